from fractions import Fraction

import pytest

from linf import build_space
from linf.cochain import (
    ArityWindow,
    Cochain,
    CochainError,
    basis_cochain,
    bracket,
    check_codifferential,
    cochain_basis,
    differential,
    jacobi_correspondence,
    tilde,
)
from linf.gspace import EVEN, ODD
from linf.symw import coproduct, enumerate_monomials

W11 = build_space(["e"], ["f"])
W02 = build_space([], ["f1", "f2"])
W10 = build_space(["e"], [])
W20 = build_space(["e1", "e2"], [])
BIG = ArityWindow(1, 16)


def phi(k):
    return basis_cochain(W10, {"e": k}, "e")


def phi_e(k):
    return basis_cochain(W11, {"e": k}, "e")


def phi_f(k):
    return basis_cochain(W11, {"e": k - 1, "f": 1}, "f")


def psi_e(k):
    return basis_cochain(W11, {"e": k - 1, "f": 1}, "e")


def psi_f(k):
    return basis_cochain(W11, {"e": k}, "f")


def p02(i, j):
    return basis_cochain(W02, {f"f{i}": 1}, f"f{j}")


def s02(j):
    return basis_cochain(W02, {"f1": 1, "f2": 1}, f"f{j}")


Z02 = Cochain.zero(W02)


def test_factorial_normalization():
    assert phi(2).evaluate((2,)) == {0: 2}
    assert psi_e(4).evaluate((3, 1)) == {0: 6}
    assert psi_e(4).evaluate((4, 0)) == {}


def test_parities():
    assert phi_e(3).parity == EVEN and phi_f(3).parity == EVEN
    assert psi_e(3).parity == ODD and psi_f(3).parity == ODD
    assert Cochain.zero(W11).parity == EVEN


def test_mixed_parity_rejected():
    with pytest.raises(CochainError):
        phi_e(1) + psi_e(1)


def test_unknown_output():
    with pytest.raises(CochainError):
        basis_cochain(W11, {"e": 1}, "g")


@pytest.mark.parametrize("n", range(1, 7))
def test_tilde_identity_counts(n):
    assert tilde(phi(1), (n,)) == {(n,): n}


def test_tilde_top_degree():
    assert tilde(s02(1), (1, 1)) == {(1, 0): 1}


def test_tilde_phi2():
    assert tilde(phi(2), (3,)) == {(2,): 6}


@pytest.mark.parametrize("k", range(1, 9))
@pytest.mark.parametrize("l", range(1, 9))
def test_even_line_structure_constants(k, l):
    assert bracket(phi(k), phi(l), BIG) == phi(k + l - 1) * (k - l)


# the published 0|2 table, phi^i_j sends f_i to f_j and psi_j sends f1 f2 to f_j
TABLE_02 = [
    ((1, 1), (1, 1), Z02),
    ((1, 1), (1, 2), -p02(1, 2)),
    ((1, 1), (2, 1), p02(2, 1)),
    ((1, 2), (2, 1), p02(2, 2) - p02(1, 1)),
    ((1, 1), (2, 2), Z02),
    ((1, 2), (2, 2), -p02(1, 2)),
    ((2, 1), (2, 2), p02(2, 1)),
    ((1, 1), 1, Z02),
    ((1, 2), 1, s02(2)),
    ((2, 1), 1, Z02),
    ((2, 2), 1, -s02(1)),
    ((1, 1), 2, -s02(2)),
    ((1, 2), 2, Z02),
    ((2, 1), 2, s02(1)),
    ((2, 2), 2, Z02),
]


def _c02(x):
    return p02(*x) if isinstance(x, tuple) else s02(x)


@pytest.mark.parametrize("a,b,want", TABLE_02, ids=lambda x: str(x) if not isinstance(x, Cochain) else "")
def test_odd_plane_table(a, b, want):
    assert bracket(_c02(a), _c02(b)) == want


@pytest.mark.parametrize("i", [1, 2])
@pytest.mark.parametrize("j", [1, 2])
def test_odd_plane_psi_psi(i, j):
    assert bracket(s02(i), s02(j)) == Z02


@pytest.mark.parametrize("m", range(1, 7))
@pytest.mark.parametrize("n", range(1, 7))
def test_mixed_line_families(m, n):
    k = m + n - 1
    assert bracket(phi_e(m), phi_e(n), BIG) == phi_e(k) * (m - n)
    assert bracket(phi_e(m), phi_f(n), BIG) == phi_f(k) * (1 - n)
    assert bracket(phi_f(m), phi_f(n), BIG).is_zero()
    assert bracket(phi_e(m), psi_e(n), BIG) == psi_e(k) * (m - n + 1)
    assert bracket(phi_f(m), psi_e(n), BIG) == -psi_e(k)
    assert bracket(phi_e(m), psi_f(n), BIG) == psi_f(k) * (-n)
    assert bracket(phi_f(m), psi_f(n), BIG) == psi_f(k)
    assert bracket(psi_e(m), psi_f(n), BIG) == phi_e(k) + phi_f(k) * n
    assert bracket(psi_e(n), psi_e(n), BIG).is_zero()
    assert bracket(psi_f(n), psi_f(n), BIG).is_zero()


def _multi(I, k):
    return basis_cochain(W20, {"e1": I[0], "e2": I[1]}, f"e{k}")


def _minus(I, k):
    J = list(I)
    if J[k - 1] == 0:
        return None
    J[k - 1] -= 1
    return tuple(J)


MULTI = [(a, b) for n in range(1, 4) for a in range(n + 1) for b in [n - a]]


@pytest.mark.parametrize("I", MULTI)
@pytest.mark.parametrize("J", MULTI)
def test_multi_index_brackets(I, J):
    for k in (1, 2):
        for l in (1, 2):
            want = Cochain.zero(W20)
            Il, Jk = _minus(I, l), _minus(J, k)
            if Il is not None:
                want = want + _multi((J[0] + Il[0], J[1] + Il[1]), k) * I[l - 1]
            if Jk is not None:
                want = want - _multi((I[0] + Jk[0], I[1] + Jk[1]), l) * J[k - 1]
            assert bracket(_multi(I, k), _multi(J, l), BIG) == want


def test_differential_examples():
    assert differential(s02(1), p02(1, 2)) == -s02(2)
    for L in range(1, 5):
        for k in range(1, 6):
            assert differential(psi_e(L), psi_e(k), BIG).is_zero()


def test_check_codifferential():
    for L in range(1, 5):
        assert check_codifferential(psi_e(L), BIG)
    bad = check_codifferential(psi_e(2) + psi_f(3), BIG)
    assert not bad
    assert not bad.certificate.is_zero()
    assert set(bad.certificate.arities()) == {4}
    even = check_codifferential(phi_e(2), BIG)
    assert not even and even.reason == "not odd"


def test_jacobi_correspondence_examples():
    assert jacobi_correspondence(s02(1))
    assert jacobi_correspondence(Z02)
    W3 = build_space([], ["a", "b", "c"])
    d = basis_cochain(W3, {"a": 1, "b": 1}, "a") + basis_cochain(W3, {"a": 1, "c": 1}, "b")
    assert not check_codifferential(d)
    assert jacobi_correspondence(d) is False


def test_jacobi_correspondence_rejects_even_part():
    with pytest.raises(CochainError):
        jacobi_correspondence(psi_e(2))


def test_cocycle_closure():
    d = s02(1)
    cocycles = [c for c in [p02(1, 1), p02(2, 1), s02(1), s02(2)] if differential(d, c).is_zero()]
    assert len(cocycles) == 4
    for x in cocycles:
        for y in cocycles:
            assert differential(d, bracket(x, y)).is_zero()
    w = ArityWindow(1, 8)
    d = psi_e(3)
    cyc = [phi_e(1) - phi_f(1), phi_e(2), psi_e(1), psi_e(2)]
    for x in cyc:
        assert differential(d, x, w).is_zero()
        for y in cyc:
            assert differential(d, bracket(x, y, w), w).restrict(ArityWindow(1, 6)).is_zero()


def test_window_restricts_result():
    assert bracket(phi(2), phi(3), ArityWindow(1, 3)).is_zero()
    assert bracket(phi(2), phi(3), ArityWindow(1, 4)) == -phi(4)


def test_basis_enumeration_counts():
    for k in range(1, 6):
        assert len(cochain_basis(W11, k)) == 4
        assert len(cochain_basis(W20, k)) == 2 * (k + 1)
