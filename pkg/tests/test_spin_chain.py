import numpy as np
import pytest
from scipy.linalg import expm

from qsca.errors import DimensionTooLarge, NotHermitian
from qsca.qstate import circuit_matrix
from qsca.quantize import total_step
from qsca.spin_chain import (
    HamiltonianSum,
    PauliTerm,
    build_chain_hamiltonian,
    build_site_hamiltonian,
    emit_hamiltonian_terms,
    generator_cn,
    generator_not,
    matrix_exp_hermitian,
    sum_product_gap,
    to_dense,
)

X = np.array([[0.0, 1.0], [1.0, 0.0]])
Z = np.array([[1.0, 0.0], [0.0, -1.0]])
CN = np.array([[1, 0, 0, 0],
               [0, 1, 0, 0],
               [0, 0, 0, 1],
               [0, 0, 1, 0]], dtype=float)


def placed(op, site, n):
    """op acting on one site of an n-site chain, site 1 leftmost."""
    mat = np.eye(1)
    for s in range(1, n + 1):
        mat = np.kron(mat, op if s == site else np.eye(2))
    return mat


def chain_oracle(n, r, variant):
    """Direct Kronecker build of the chain generator, no Pauli bookkeeping."""
    dim = 2 ** n
    total = np.zeros((dim, dim))
    eye = np.eye(dim)
    for i in range(1, n + 1):
        if variant == "literal":
            total += (placed(Z, i, n) + placed(X, i, n)) / 2
        else:
            total += (eye - placed(X, i, n)) / 2
        for k in range(1, r + 1):
            for j in (i - k, i + k):
                if not 1 <= j <= n:
                    continue
                if variant == "literal":
                    total += (eye - placed(Z, j, n)) @ \
                        (placed(X, i, n) - eye) / 2
                else:
                    total += (eye - placed(Z, j, n)) @ \
                        (eye - placed(X, i, n)) / 4
    return total


# -- terms ------------------------------------------------------------------

def test_pauli_term_validation():
    term = PauliTerm(0.5, ((3, "Z"), (1, "X")))
    assert term.factors == ((1, "X"), (3, "Z"))
    assert term.support == (1, 3)
    with pytest.raises(ValueError):
        PauliTerm(1.0, ((1, "Y"),))
    with pytest.raises(ValueError):
        PauliTerm(1.0, ((2, "X"), (2, "Z")))


def test_hamiltonian_sum_range_check():
    with pytest.raises(ValueError):
        HamiltonianSum(2, 1, (PauliTerm(1.0, ((3, "X"),)),))


# -- gate generators --------------------------------------------------------

def test_generators_hermitian():
    for variant in ("literal", "verified"):
        g = generator_not(variant)
        assert np.array_equal(g, g.T)
        for order in (True, False):
            g = generator_cn(variant, order)
            assert np.array_equal(g, g.T)


def test_verified_generators_exponentiate_to_gates():
    assert np.abs(expm(1j * np.pi * generator_not("verified")) - X).max() \
        <= 1e-12
    assert np.abs(expm(1j * np.pi * generator_cn("verified")) - CN).max() \
        <= 1e-12
    # target-first ordering controls on the second qubit
    swapped = np.array([[1, 0, 0, 0],
                        [0, 0, 0, 1],
                        [0, 0, 1, 0],
                        [0, 1, 0, 0]], dtype=float)
    assert np.abs(expm(1j * np.pi * generator_cn("verified", False))
                  - swapped).max() <= 1e-12


def test_verified_cn_generator_is_projector():
    g = generator_cn("verified")
    assert np.abs(g @ g - g).max() <= 1e-12
    assert np.trace(g) == pytest.approx(1.0)


def test_literal_generators_documented_mismatch():
    # as printed, the NOT generator rotates to a different unitary and
    # the CN generator is -2x a projector, exponentiating to the identity
    got = expm(1j * np.pi * generator_not("literal"))
    angle = np.pi / np.sqrt(2)
    want = np.cos(angle) * np.eye(2) + 1j * np.sin(angle) * (Z + X) / np.sqrt(2)
    assert np.abs(got - want).max() <= 1e-12
    assert np.abs(got - X).max() > 0.5
    got_cn = expm(1j * np.pi * generator_cn("literal"))
    assert np.abs(got_cn - np.eye(4)).max() <= 1e-12


def test_generator_variant_validation():
    with pytest.raises(ValueError):
        generator_not("printed")


# -- site and chain sums ----------------------------------------------------

def test_site_hamiltonian_locality():
    h = build_site_hamiltonian(5, 2, 9)
    for term in h.terms:
        assert all(3 <= s <= 7 for s in term.support)
    edge = build_site_hamiltonian(1, 2, 9)
    for term in edge.terms:
        assert all(1 <= s <= 3 for s in term.support)
        # only right neighbors survive at the left edge
        assert all(s >= 1 for s in term.support)


def test_site_hamiltonian_matches_kron_oracle():
    for variant in ("literal", "verified"):
        for (i, r, n) in ((3, 2, 5), (1, 1, 4), (4, 3, 6)):
            dense = to_dense(build_site_hamiltonian(i, r, n, variant))
            eye = np.eye(2 ** n)
            if variant == "literal":
                want = (placed(Z, i, n) + placed(X, i, n)) / 2
            else:
                want = (eye - placed(X, i, n)) / 2
            for k in range(1, r + 1):
                for j in (i - k, i + k):
                    if not 1 <= j <= n:
                        continue
                    if variant == "literal":
                        want = want + (eye - placed(Z, j, n)) @ \
                            (placed(X, i, n) - eye) / 2
                    else:
                        want = want + (eye - placed(Z, j, n)) @ \
                            (eye - placed(X, i, n)) / 4
            assert np.abs(dense - want).max() <= 1e-12


def test_chain_hamiltonian_matches_kron_oracle():
    for variant in ("literal", "verified"):
        for (n, r) in ((4, 1), (5, 2), (4, 3)):
            dense = to_dense(build_chain_hamiltonian(n, r, variant))
            assert np.abs(dense - chain_oracle(n, r, variant)).max() <= 1e-12


def test_chain_single_site_literal():
    h = to_dense(build_chain_hamiltonian(1, 2, "literal"))
    assert np.array_equal(h, (X + Z) / 2)
    vals = np.linalg.eigvalsh(h)
    assert np.allclose(vals, [-1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_chain_hermitian_exact():
    for n, r in ((12, 1), (12, 2), (12, 3), (8, 2)):
        dense = to_dense(build_chain_hamiltonian(n, r))
        assert np.abs(dense - dense.T).max() == 0.0


def test_chain_interior_terms_shift_covariant():
    n, r = 9, 2
    for variant in ("literal", "verified"):
        for i in range(r + 1, n - r):
            here = build_site_hamiltonian(i, r, n, variant)
            there = build_site_hamiltonian(i + 1, r, n, variant)
            shifted = sorted(
                (t.coefficient, tuple((s + 1, op) for s, op in t.factors))
                for t in here.terms)
            actual = sorted((t.coefficient, t.factors) for t in there.terms)
            assert shifted == actual


def test_chain_two_site_terms_within_range():
    h = build_chain_hamiltonian(10, 3)
    for term in h.terms:
        sites = term.support
        assert len(sites) <= 2
        if len(sites) == 2:
            assert sites[1] - sites[0] <= 3


# -- dense realization ------------------------------------------------------

def test_to_dense_basics():
    assert np.array_equal(to_dense(HamiltonianSum(2, 1, ())), np.zeros((4, 4)))
    single = HamiltonianSum(2, 1, (PauliTerm(1.0, ((1, "X"),)),))
    assert np.array_equal(to_dense(single), np.kron(X, np.eye(2)))
    zz = HamiltonianSum(2, 1, (PauliTerm(0.5, ((1, "Z"), (2, "X"))),))
    assert np.array_equal(to_dense(zz), 0.5 * np.kron(Z, X))
    with pytest.raises(DimensionTooLarge):
        to_dense(HamiltonianSum(15, 1, ()))


def test_to_dense_linear():
    a = build_chain_hamiltonian(4, 1, "literal")
    b = build_chain_hamiltonian(4, 2, "verified")
    merged = HamiltonianSum(4, 2, a.terms + b.terms)
    assert np.abs(to_dense(merged) - to_dense(a) - to_dense(b)).max() <= 1e-12


# -- exponentials -----------------------------------------------------------

def test_matrix_exp_hermitian():
    h = to_dense(build_chain_hamiltonian(3, 1))
    assert np.abs(matrix_exp_hermitian(h, 0.0) - np.eye(8)).max() <= 1e-12
    rng = np.random.default_rng(9)
    raw = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    herm = raw + raw.conj().T
    assert np.abs(matrix_exp_hermitian(herm, 0.7)
                  - expm(0.7j * herm)).max() <= 1e-9
    with pytest.raises(NotHermitian):
        matrix_exp_hermitian(raw, 1.0)


def test_site_exponential_equals_site_circuit():
    # the verified site generator commutes term by term, so its
    # exponential is exactly the per-site gate product
    from qsca.quantize import build_uf_circuit
    for (i, r, n) in ((2, 1, 4), (3, 2, 5)):
        h = to_dense(build_site_hamiltonian(i, r, n))
        gate = matrix_exp_hermitian(h, np.pi)
        want = circuit_matrix(build_uf_circuit(r, i, n))
        assert np.abs(gate - want).max() <= 1e-10


def test_sum_product_gap():
    report = sum_product_gap(5, 2)
    assert report.product_vs_circuit <= 1e-9
    assert report.sum_vs_product >= 0.0
    single = sum_product_gap(1, 1)
    assert single.sum_vs_product <= 1e-12
    with pytest.raises(DimensionTooLarge):
        sum_product_gap(9, 1)


# -- text format ------------------------------------------------------------

def test_emit_hamiltonian_terms_golden():
    h = build_chain_hamiltonian(1, 1, "literal")
    assert emit_hamiltonian_terms(h) == "0.5 1:X\n0.5 1:Z\n"
    n2 = emit_hamiltonian_terms(build_chain_hamiltonian(2, 1))
    lines = n2.strip().splitlines()
    assert lines[0].split()[1:] == []  # leading scalar term
    assert all(":" in part for line in lines[1:]
               for part in line.split()[1:])


def test_emit_hamiltonian_sorted_and_parsable():
    h = build_chain_hamiltonian(4, 2)
    lines = emit_hamiltonian_terms(h).strip().splitlines()
    keys = []
    for line in lines:
        parts = line.split()
        float(parts[0])
        sites = tuple(int(p.split(":")[0]) for p in parts[1:])
        ops = tuple(p.split(":")[1] for p in parts[1:])
        keys.append((sites, ops))
    assert keys == sorted(keys)
