import numpy as np
import pytest

from qsca.errors import DimensionTooLarge, RadiusError
from qsca.qstate import Circuit, Cn, Not, basis_state, circuit_matrix
from qsca.quantize import (
    build_uf_circuit,
    build_uf_matrix,
    check_partial_isometry,
    emit_matrix_csv,
    emit_matrix_triplets,
    parallelism_demo,
    partition_basis,
    represent_blocked,
    total_step,
)
from qsca.sca_core import Configuration, Rule, f_window, step


def word_bits(x, width):
    return tuple((x >> (width - 1 - i)) & 1 for i in range(width))


def dyad_sum(r):
    """Independent build: sum of |f(x)><x| outer products."""
    rule = Rule(r)
    width = rule.window_len
    dim = 2 ** width
    mat = np.zeros((dim, dim), dtype=np.int64)
    for x in range(1, dim):
        bits = f_window(rule, word_bits(x, width))
        e_in = np.zeros(dim, dtype=np.int64)
        e_in[x] = 1
        e_out = np.zeros(dim, dtype=np.int64)
        e_out[int("".join(str(b) for b in bits), 2)] = 1
        mat += np.outer(e_out, e_in)
    return mat


def play_gates(n, ops, bits):
    """Bit-level playback of X/CN gates on a single basis word."""
    bits = list(bits)
    for op in ops:
        if isinstance(op, Not):
            bits[op.q - 1] ^= 1
        elif isinstance(op, Cn):
            bits[op.target - 1] ^= bits[op.control - 1]
        else:
            raise AssertionError(op)
    return tuple(bits)


# -- transition matrix ------------------------------------------------------

def test_build_uf_matrix_radius2():
    t_op = build_uf_matrix(2)
    assert t_op.dimension == 32
    assert t_op.matrix.sum() == 31
    assert t_op.null_word == (0, 0, 0, 0, 0)
    assert t_op.preimage_word == (0, 0, 1, 0, 0)
    # the missing word maps to the null word; the null column is empty
    assert t_op.matrix[0, t_op.preimage_index] == 1
    assert not t_op.matrix[:, t_op.null_index].any()
    assert not t_op.matrix[t_op.preimage_index, :].any()


def test_build_uf_matrix_matches_dyad_sum():
    for r in (1, 2):
        assert np.array_equal(build_uf_matrix(r).matrix, dyad_sum(r))


def test_build_uf_matrix_radius_bounds():
    with pytest.raises(RadiusError):
        build_uf_matrix(0)
    with pytest.raises(RadiusError):
        build_uf_matrix(7)


def test_equivariance_with_window_map():
    # applying the matrix to a word state gives the stepped word state
    for r in (1, 2, 3):
        rule = Rule(r)
        width = rule.window_len
        mat = build_uf_matrix(r).matrix
        for x in range(1, 2 ** width):
            out = mat @ basis_state(word_bits(x, width)).amplitudes
            want = basis_state(f_window(rule, word_bits(x, width))).amplitudes
            assert np.array_equal(out, want)


def test_partial_isometry_identities():
    for r in (1, 2, 3):
        report = check_partial_isometry(build_uf_matrix(r))
        assert report.range_residual == 0
        assert report.support_residual == 0
        assert report.norm_deviation <= 1e-12
        assert report.ok


def test_partial_isometry_detects_corruption():
    t_op = build_uf_matrix(1)
    bad = t_op.matrix.copy()
    col = 3
    row = int(np.flatnonzero(bad[:, col])[0])
    bad[row, col] = 0
    bad[(row + 1) % 8, col] = 1
    corrupted = type(t_op)(t_op.radius, bad, t_op.null_word,
                           t_op.preimage_word)
    report = check_partial_isometry(corrupted)
    assert not report.ok
    assert report.range_residual > 0 or report.support_residual > 0


# -- basis partition and block form -----------------------------------------

def test_partition_radius1_order():
    part = partition_basis(1)
    as_ints = [int("".join(map(str, w)), 2) for w in part.invariant_words]
    assert as_ints == [1, 3, 4, 6]
    as_ints = [int("".join(map(str, w)), 2) for w in part.flipped_words]
    assert as_ints == [0, 5, 7, 2]


def test_partition_covers_basis():
    for r in (1, 2, 3):
        part = partition_basis(r)
        rule = Rule(r)
        width = rule.window_len
        words = set(part.invariant_words) | set(part.flipped_words)
        assert len(part.invariant_words) == 2 ** (2 * r)
        assert len(words) == 2 ** width
        # invariant words are the fixed points; flipped words pair with
        # their center-flips
        for w in part.invariant_words:
            assert f_window(rule, w) == w
        for w in part.flipped_words:
            if any(w):
                flip = w[:r] + (1 - w[r],) + w[r + 1:]
                assert f_window(rule, w) == flip


def test_blocked_form_radius1_golden():
    blocked = represent_blocked(build_uf_matrix(1), partition_basis(1))
    want = np.zeros((8, 8), dtype=np.int8)
    want[:4, :4] = np.eye(4)
    want[4, 7] = want[5, 6] = want[6, 5] = 1
    assert np.array_equal(blocked, want)


def test_blocked_form_radius2():
    blocked = represent_blocked(build_uf_matrix(2), partition_basis(2))
    want = np.zeros((32, 32), dtype=np.int8)
    want[:16, :16] = np.eye(16)
    for k in range(15):
        want[16 + k, 31 - k] = 1
    assert np.array_equal(blocked, want)


def test_blocked_form_stable_under_repartition():
    t_op = build_uf_matrix(2)
    first = represent_blocked(t_op, partition_basis(2))
    second = represent_blocked(t_op, partition_basis(2))
    assert np.array_equal(first, second)


# -- circuit factorization --------------------------------------------------

def test_build_uf_circuit_gate_order():
    circuit = build_uf_circuit(2, 3, 5)
    assert circuit.ops == (Cn(1, 3), Cn(2, 3), Cn(4, 3), Cn(5, 3), Not(3))
    edge = build_uf_circuit(2, 1, 5)
    assert edge.ops == (Cn(2, 1), Cn(3, 1), Not(1))
    with pytest.raises(ValueError):
        build_uf_circuit(2, 6, 5)


def test_circuit_factorization_exact():
    for r in (1, 2, 3):
        t_op = build_uf_matrix(r)
        mat = circuit_matrix(build_uf_circuit(r, r + 1, 2 * r + 1))
        assert np.array_equal(mat.imag, np.zeros_like(mat.real))
        projected = mat.real.copy()
        projected[:, t_op.null_index] = 0
        assert np.array_equal(projected.astype(np.int8), t_op.matrix)


def test_circuit_on_vacuum_word():
    circuit = build_uf_circuit(2, 3, 5)
    out = circuit_matrix(circuit) @ basis_state((0,) * 5).amplitudes
    assert np.array_equal(out, basis_state((0, 0, 1, 0, 0)).amplitudes)


# -- whole-chain step -------------------------------------------------------

def test_total_step_shift_covariant_subcircuits():
    n = 9
    for r in (1, 2):
        for site in range(r + 1, n - r):
            a = build_uf_circuit(r, site, n).ops
            b = build_uf_circuit(r, site + 1, n).ops
            shifted = []
            for op in a:
                if isinstance(op, Not):
                    shifted.append(Not(op.q + 1))
                else:
                    shifted.append(Cn(op.control + 1, op.target + 1))
            assert tuple(shifted) == b


def test_total_step_circuit_concatenates_sites():
    circuit = total_step(2, 6, "unitary_circuit")
    want = []
    for site in range(1, 7):
        want.extend(build_uf_circuit(2, site, 6).ops)
    assert circuit.ops == tuple(want)


def test_total_step_circuit_vacuum_image():
    # the unitary reading does not fix the vacuum: each unconditional
    # NOT fires unless an earlier new 1 sits within reach, leaving a 1
    # every r+1 sites
    for r, n in ((1, 5), (2, 5), (2, 7)):
        circuit = total_step(r, n, "unitary_circuit")
        out = circuit_matrix(circuit) @ basis_state((0,) * n).amplitudes
        got = word_bits(int(np.flatnonzero(out)[0]), n)
        assert got == play_gates(n, circuit.ops, (0,) * n)
        assert got == tuple(1 if i % (r + 1) == 0 else 0 for i in range(n))


def test_total_step_isometry_fixes_vacuum():
    op = total_step(2, 8, "partial_isometry").tocsc()
    assert int(op.indices[op.indptr[0]]) == 0


def test_total_step_isometry_matches_classical_scan():
    # words whose support stays clear of the right boundary evolve
    # exactly as on the infinite lattice
    rule = Rule(2)
    n = 12
    op = total_step(2, n, "partial_isometry").tocsc()
    for x in range(32):
        config = Configuration(4, word_bits(x, 5))
        word = sum(config.site(s) << (n - s) for s in range(1, n + 1))
        image = int(op.indices[op.indptr[word]])
        stepped = step(rule, config)
        want = sum(stepped.site(s) << (n - s) for s in range(1, n + 1))
        if not stepped.is_empty:
            assert stepped.origin >= 1 and stepped.end <= n
        assert image == want


def test_total_step_isometry_columns_are_units():
    op = total_step(1, 6, "partial_isometry").tocsc()
    counts = np.diff(op.indptr)
    assert np.array_equal(counts, np.ones(2 ** 6, dtype=counts.dtype))


def test_total_step_validation():
    with pytest.raises(ValueError):
        total_step(2, 6, "both")
    with pytest.raises(DimensionTooLarge):
        total_step(2, 15, "partial_isometry")


# -- superposition update ---------------------------------------------------

def test_parallelism_radius2():
    report = parallelism_demo(2)
    assert report.applications == 1
    assert report.image_count == 31
    assert report.expected_amplitude == pytest.approx(1 / np.sqrt(31),
                                                      abs=1e-15)
    assert report.max_deviation <= 1e-12
    assert abs(report.norm - 1.0) <= 1e-12
    assert report.ok


def test_parallelism_image_misses_only_preimage_word():
    t_op = build_uf_matrix(2)
    out = t_op.matrix.astype(float) @ \
        np.where(np.arange(32) == 0, 0, 1 / np.sqrt(31))
    assert out[t_op.preimage_index] == 0
    hits = np.flatnonzero(out)
    assert hits.size == 31
    assert np.allclose(out[hits], 1 / np.sqrt(31))


# -- text formats -----------------------------------------------------------

def test_emit_matrix_triplets_golden():
    mat = np.array([[0, 1], [2, 0.5]])
    assert emit_matrix_triplets(mat) == "1 2 1\n2 1 2\n2 2 0.5\n"
    assert emit_matrix_triplets(np.zeros((2, 2))) == ""


def test_emit_matrix_csv():
    assert emit_matrix_csv(np.eye(2, dtype=np.int8)) == "1,0\n0,1\n"
    with pytest.raises(DimensionTooLarge):
        emit_matrix_csv(np.zeros((5000, 5000), dtype=np.int8))
