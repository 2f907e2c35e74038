import itertools
import json
import math

import pytest

from tmodule_lab.fields import GF
from tmodule_lab.ore import TwistedOperator
from tmodule_lab.parsing import parse_mpoly
from tmodule_lab.presets import carlitz, carlitz_tensor, diagonal, random_module
from tmodule_lab.saturation import (
    KappaReport, diagonal_exponent_count, kappa_bracket, multiplicativity_residual,
    psi_build, saturation_table, span_dimension, subsets_by_degree,
)

K2, K3 = GF(2), GF(3)


def test_psi_examples():
    b = psi_build(carlitz(3), 2, 2)
    assert b.get(0, 0, 1) == parse_mpoly(K3, "x1", 1)
    assert b.get(0, 1, 1) == parse_mpoly(K3, "T*x1 + x1^3", 1)
    b = psi_build(diagonal(2, 4), 2, 3)
    assert b.get(0, 1, 1) == parse_mpoly(K2, "x1^2", 2)
    assert b.get(1, 1, 1) == parse_mpoly(K2, "x2^4", 2)
    assert b.get(1, 1, 2) == b.get(1, 1, 1) ** 2
    assert len(psi_build(carlitz_tensor(2, 2), 1, 2).funcs) == 2
    with pytest.raises(ValueError):
        psi_build(carlitz(2), 0, 2)


def test_psi_degree_invariant():
    F = carlitz_tensor(2, 2)
    b = psi_build(F, 4, 3)
    from tmodule_lab.ore import iterate
    for n in range(4):
        tdeg = iterate(F, n).tau_degree
        assert max(b.get(i, n, 1).total_degree() for i in range(2)) == 2 ** tdeg
        for i in range(2):
            assert b.get(i, n, 2) == b.get(i, n, 1) ** 2


@pytest.mark.parametrize("weights", [[1, 2, 2, 3], [0, 1, 1], [5], [], [2, 1, 4, 1, 3]])
def test_subsets_by_degree_enumerates_each_subset_once(weights):
    got = list(subsets_by_degree(weights))
    assert len(got) == 2 ** len(weights)
    assert len({tuple(sorted(s)) for s in got}) == len(got)
    totals = [sum(weights[k] for k in s) for s in got]
    assert totals == sorted(totals)
    capped = list(subsets_by_degree(weights, cap=3))
    brute = [s for r in range(len(weights) + 1) for s in itertools.combinations(range(len(weights)), r)
             if sum(weights[k] for k in s) <= 3]
    assert len(capped) == len(brute)
    assert len(list(subsets_by_degree(weights, budget=3))) == min(3, 2 ** len(weights))


@pytest.mark.parametrize("N,L", [(N, L) for N in (1, 2, 3) for L in (1, 2, 3)])
def test_diagonal_matches_exponent_oracle(N, L):
    rep = span_dimension(psi_build(diagonal(2, 4), N, L))
    assert rep.dims[(N, L)] == diagonal_exponent_count([2, 4], N, L)
    assert not rep.truncated[(N, L)]


@pytest.mark.parametrize("p", [2, 3])
def test_carlitz_counts(p):
    F = carlitz(p)
    # N = 1: the Psi are x^j, j < L; subset sums of {1, .., L-1} fill 0..L(L-1)/2
    for L in (2, 3, 4):
        assert span_dimension(psi_build(F, 1, L)).dims[(1, L)] == L * (L - 1) // 2 + 1
    # L = 2: leading exponents of distinct subsets differ, so every product is independent
    for N in (1, 2, 3):
        assert span_dimension(psi_build(F, N, 2)).dims[(N, 2)] == 2 ** N
    # distinct leading exponents always give a lower bound
    rep = span_dimension(psi_build(F, 2, 3))
    assert rep.dims[(2, 3)] >= diagonal_exponent_count([p], 2, 3)


def test_monotone_and_counting_bound():
    F, _, _ = random_module(2, 2, 1, 5)
    rep = saturation_table(F, [1, 2], [2, 3], budget=300)
    assert rep.is_monotone()
    for key, dim in rep.dims.items():
        assert dim <= rep.counting_bound[key]
    rep = saturation_table(carlitz_tensor(2, 2), [1, 2, 3], [2])
    rep.merge(saturation_table(carlitz_tensor(2, 2), [1, 2], [3]))
    assert rep.is_monotone()


def test_budget_sets_lower_bound_flag():
    rep = span_dimension(psi_build(diagonal(2, 4), 3, 3), budget=50)
    assert rep.truncated[(3, 3)]
    assert rep.dims[(3, 3)] <= diagonal_exponent_count([2, 4], 3, 3)
    assert any("lower bound" in n for n in rep.notes)
    rep = span_dimension(psi_build(diagonal(2, 4), 2, 2, degree_cap=4))
    assert not rep.truncated[(2, 2)]
    # Psi = x1, x2, x1^2, x2^4; distinct monomials from subsets of total degree <= 4
    psis = [(1, 0), (0, 1), (2, 0), (0, 4)]
    seen = set()
    for r in range(5):
        for sub in itertools.combinations(psis, r):
            e = tuple(map(sum, zip((0, 0), *sub)))
            if sum(e) <= 4:
                seen.add(e)
    assert rep.dims[(2, 2)] == len(seen) == 9


def test_brackets():
    rep = saturation_table(diagonal(2, 4), [1, 2, 3], [2, 3])
    lo, hi = kappa_bracket(diagonal(2, 4), rep)
    assert lo <= 2 ** 1.5 <= hi and hi == pytest.approx(4)
    for p in (2, 3):
        F = carlitz(p)
        rep = saturation_table(F, [1, 2, 3], [2, 3])
        assert kappa_bracket(F, rep) == pytest.approx((p, p))
    ident = TwistedOperator.identity(K2, 2)
    rep = saturation_table(ident, [1, 2], [2, 3])
    assert kappa_bracket(ident, rep) == pytest.approx((1, 1))
    with pytest.raises(ValueError):
        kappa_bracket(ident, saturation_table(ident, [1], [2]))


def test_report_json_and_residual():
    rep = saturation_table(diagonal(2, 4), [1, 2], [2])
    kappa_bracket(diagonal(2, 4), rep)
    data = json.loads(rep.to_json())
    row = data["rows"][0]
    assert set(row) == {"N", "L", "degree_cap", "dim", "estimate", "lower_bound_only", "products"}
    assert data["bracket"][1] == pytest.approx(4)
    assert multiplicativity_residual(2, 1, 2, 1, 1, 0) == 0
