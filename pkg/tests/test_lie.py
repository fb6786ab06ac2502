import random

import pytest

from gencontact.casebook import builtin_cases
from gencontact.jet import Generator
from gencontact.lie import (
    BracketCache,
    ClosureFailure,
    DependentBasis,
    LieAlgebraBasis,
    closure_check,
    combination,
    commutator,
    express_in_basis,
    format_structure_line,
    independent,
    jacobi_residual,
    rank,
)

from .conftest import P

CASES = {r.id: r for r in builtin_cases()}


def G(xi="0", ey="0", ez="0", name=""):
    return Generator(P(xi), (P(ey), P(ez)), ("x", "y", "z"), name)


def basis(case_id):
    return [cg.generator.renamed(cg.name) for cg in CASES[case_id].generators]


def test_translations_commute():
    assert commutator(G(ey="1"), G(ez="1")).is_zero()


def test_bracket_x3_x5_is_x2():
    br = commutator(G(ez="1", name="X3"), G(ey="z", name="X5"))
    assert br == G(ey="1", name="[X3,X5]")
    assert express_in_basis(br, basis("I.1")) == tuple(P("1") if i == 1 else P("0") for i in range(15))


def test_bracket_with_exponential_scales_by_radical():
    x1, y3 = CASES["I.2"].generator("X1").generator, CASES["I.2"].generator("Y3").generator
    assert (commutator(x1, y3) - y3.scale(P("sqrt(a0)"))).is_zero()


def test_express_examples():
    assert express_in_basis(G(ey="1"), [G(ey="1"), G(ez="1")]) == (P("1"), P("0"))
    assert express_in_basis(G(ey="y"), [G(ey="1")]) is None


def test_mismatched_spaces_are_rejected():
    other = Generator(P("1"), (P("0"),), ("x", "y"))
    with pytest.raises(ValueError):
        commutator(G(xi="1"), other)


def test_textbook_non_closure():
    res = closure_check([G(xi="1", name="A"), G(xi="x^2", name="B")])
    assert isinstance(res, ClosureFailure)
    assert (res.i, res.j) == (0, 1)
    assert res.bracket.xi == P("2*x")


def test_dependent_basis_is_reported():
    res = closure_check([G(xi="1"), G(ey="x"), G(xi="2", ey="-3*x")])
    assert isinstance(res, DependentBasis) and res.indices == [2]


def test_case_I1_closes_with_105_brackets():
    cache = BracketCache()
    res = closure_check(basis("I.1"), cache)
    assert isinstance(res, LieAlgebraBasis) and res.dimension == 15
    assert len(res.structure) == 105
    assert len(cache._data) == 105


def test_case_II1_closes():
    res = closure_check(basis("II.1"))
    assert isinstance(res, LieAlgebraBasis) and res.dimension == 7


def test_structure_constants_reconstruct_brackets():
    b = basis("I.1")
    alg = closure_check(b)
    for (i, j), coeffs in list(alg.structure.items())[:30]:
        assert combination(coeffs, b) - commutator(b[i], b[j]) == G()
        assert alg.constants(j, i) == tuple(-c for c in coeffs)


def test_structure_line_format():
    b = [G(ey="1", name="X2"), G(ez="1", name="X3"), G(ey="z", name="X5")]
    alg = closure_check(b)
    assert format_structure_line(alg, 1, 2) == "[X3,X5] = X2"
    assert format_structure_line(alg, 0, 1) == "[X2,X3] = 0"
    i2 = [CASES["I.2"].generator(n).generator.renamed(n) for n in ("X1", "Y3")]
    assert format_structure_line(closure_check(i2), 0, 1) == "[X1,Y3] = (sqrt(a0))*Y3"


def test_bracket_cache_serves_reversed_pair():
    cache = BracketCache()
    a, b = G(xi="x", name="A"), G(ey="x^2", name="B")
    ab = cache(a, b)
    assert cache(b, a) == ab.scale(-1)


@pytest.mark.parametrize("case_id", list(CASES))
def test_casebook_bases_independent(case_id):
    b = basis(case_id)
    assert independent(b) and rank(b) == len(b)


@pytest.mark.parametrize("case_id", list(CASES))
def test_antisymmetry_on_casebook_bases(case_id):
    b = basis(case_id)
    for i in range(len(b)):
        for j in range(i, len(b)):
            assert (commutator(b[i], b[j]) + commutator(b[j], b[i])).is_zero()


def _triples(n, seed=114):
    rng = random.Random(seed)
    ids = sorted(CASES)
    out = []
    while len(out) < n:
        b = basis(rng.choice(ids))
        out.append(tuple(rng.choice(b) for _ in range(3)))
    return out


def test_jacobi_on_sampled_triples():
    triples = _triples(50)
    assert len(triples) == 50
    for a, b, c in triples:
        assert jacobi_residual(a, b, c).is_zero(), (a.name, b.name, c.name)
