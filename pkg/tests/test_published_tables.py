"""Published tables fed through the scoring, binning and taxonomy code."""

import pytest

from published import (CORRELATION_ROUNDED, CORRELATIONS, DIVERSITY, DIVERSITY_ROUNDED, SEPARABILITY_KS, SEPARABILITY_KS_005,
                       SEPARABILITY_WILCOXON, TAXONOMY, table_records)
from rings.report import correlation_symbol, diversity_bins, overall_correlation_symbol, taxonomy_classify
from rings.separability import evaluate_separability, evaluation_score, mode_informativeness

TABLES = {"ks": (SEPARABILITY_KS, {}), "wilcoxon": (SEPARABILITY_WILCOXON, {"statistic": "wilcoxon"}),
          "ks_005": (SEPARABILITY_KS_005, {"alpha": 0.005})}


@pytest.mark.parametrize("table", TABLES)
def test_orders_give_published_informativeness(table):
    for name, (acc, auroc, s, f, ev) in TABLES[table][0].items():
        info = mode_informativeness(acc, auroc)
        assert info.rendered() == {"structure": s, "features": f}, name
        assert evaluation_score(info.structure, info.features)[1] == ev, name


@pytest.mark.parametrize("table", TABLES)
def test_fixture_records_reproduce_table(table):
    rows, kw = TABLES[table]
    recs = table_records(rows)
    for name, (acc, auroc, s, f, ev) in rows.items():
        res = evaluate_separability(recs, name, **kw)
        assert res.results["accuracy"].condensed == acc, name
        assert res.results["auroc"].condensed == auroc, name
        assert res.informativeness.rendered() == {"structure": s, "features": f}, name
        assert res.symbol == ev, name


def test_diversity_symbols():
    for name, (*values, sm_sym, ss_sym, fm_sym, fs_sym) in DIVERSITY.items():
        # rounded edge values are checked half a display unit below the edge
        v = [x - 0.005 if (name, i) in DIVERSITY_ROUNDED else x for i, x in enumerate(values)]
        got = diversity_bins(v[0], v[1]) + diversity_bins(v[2], v[3])
        assert got == (sm_sym, ss_sym, fm_sym, fs_sym), name


def test_taxonomy_thirteen_rows():
    expected = {d: action for action, names in TAXONOMY.items() for d in names}
    for name, (_, _, _, _, ev) in SEPARABILITY_KS.items():
        div = diversity_bins(DIVERSITY[name][0], DIVERSITY[name][1])[0]
        assert taxonomy_classify(ev, div, name).action == expected[name], name
    assert len(expected) == 13


def test_correlation_symbols_and_overall():
    for name, (acc, auroc, symbols, overall) in CORRELATIONS.items():
        for i, (r, sym) in enumerate(zip(acc + auroc, symbols)):
            if (name, i) in CORRELATION_ROUNDED:
                r -= 0.005
            assert correlation_symbol(r) == sym, (name, i)
        assert overall_correlation_symbol(symbols) == overall, name
