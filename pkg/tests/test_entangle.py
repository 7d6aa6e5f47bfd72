import math

import numpy as np
import pytest

from cohstates.coherent import build_cs
from cohstates.constants import ENTROPY_CUTOFF_MAX, FAMILY_L_MINUS, ISO, NEW
from cohstates.entangle import (
    METHOD_BCH, METHOD_EXPM, BeamSplitterSetting, GramMatrix, TwoModeState,
    beamsplitter_apply, embed_cs_in_two_modes, entropy_of, entropy_scan,
    expand_halfline, gram_matrix, halfline_overlap, halfline_overlap_quadrature,
    linear_entropy, published_out_expansion, reduced_density, resolve_cutoff,
    splitter_block, truncated_cs, two_mode_size, write_entropy_csv,
)
from cohstates.errors import CutoffExceeded, FamilyMismatch
from cohstates.fock import eigenfunction, truncated_oscillator_spec
from cohstates.susy import new_eigenfunction
from cohstates.utils import read_csv


def _two_mode(entradas, M=6):
    A = np.zeros((M, M), dtype=complex)
    for (a, b), v in entradas.items():
        A[a, b] = v
    return TwoModeState(A, cutoff=(M + 1) // 2)


# --------- Solapamientos ----------
def test_overlap_spot_values():
    assert halfline_overlap(0, 1) == pytest.approx(1.0, abs=1e-14)
    assert halfline_overlap(1, 1) == pytest.approx(math.sqrt(math.pi), abs=1e-12)
    assert halfline_overlap(0, 0) == pytest.approx(math.sqrt(math.pi) / 2.0, abs=1e-14)


def test_overlap_closed_form_against_quadrature():
    for a in range(21):
        for b in range(21 - a):
            if (a + b) % 2 == 0 and a + b > 0:
                continue
            q = halfline_overlap_quadrature(a, b)
            assert halfline_overlap(a, b) == pytest.approx(q, rel=1e-9, abs=1e-9)


def test_overlap_rejects_negative():
    with pytest.raises(ValueError):
        halfline_overlap(-1, 2)


def test_gram_matrix_structure():
    G = gram_matrix(9).entries
    # niveles de igual paridad: la mitad de la norma en toda la recta
    np.testing.assert_allclose(np.diag(G), 0.5, atol=1e-12)
    assert G[1, 3] == pytest.approx(0.0, abs=1e-12)
    assert G[0, 1] != pytest.approx(0.0, abs=1e-3)
    np.testing.assert_allclose(G, G.T, atol=1e-14)


# --------- Divisor de haz ----------
def test_bch_matches_matrix_exponential():
    setting = BeamSplitterSetting(math.pi / 3.0, 0.7)
    for N in range(11):
        np.testing.assert_allclose(splitter_block(N, setting, METHOD_BCH),
                                   splitter_block(N, setting, METHOD_EXPM), atol=1e-8)


def test_blocks_are_unitary():
    setting = BeamSplitterSetting(1.1, -0.4)
    for N in (3, 20):
        U = splitter_block(N, setting)
        np.testing.assert_allclose(U @ U.conj().T, np.eye(N + 1), atol=1e-10)


def test_identity_at_zero_angle():
    estado = _two_mode({(1, 2): 0.6, (0, 3): 0.8j})
    salida = beamsplitter_apply(estado, BeamSplitterSetting(0.0, 0.0))
    np.testing.assert_allclose(salida.amplitudes, estado.amplitudes, atol=1e-14)


def test_hong_ou_mandel():
    salida = beamsplitter_apply(_two_mode({(1, 1): 1.0}), BeamSplitterSetting())
    A = salida.amplitudes
    assert abs(A[1, 1]) < 1e-12
    assert abs(A[2, 0]) == pytest.approx(1.0 / math.sqrt(2.0))
    assert A[2, 0] == pytest.approx(-A[0, 2])


def test_published_expansion_support():
    setting = BeamSplitterSetting(0.9, 0.3)
    for n in range(4):
        coef = published_out_expansion(n, setting)
        assert all(a + b == 2 * n + 2 for a, b in coef)
        assert (1, 2 * n + 1) in coef


def test_published_expansion_without_mixing():
    coef = published_out_expansion(2, BeamSplitterSetting(0.0, 0.0))
    assert coef[(1, 5)] == pytest.approx(1.0)
    assert sum(abs(v) for k, v in coef.items() if k != (1, 5)) == pytest.approx(0.0, abs=1e-14)


def test_cutoff_exceeded():
    A = np.zeros((3, 3), dtype=complex)
    A[2, 2] = 1.0
    with pytest.raises(CutoffExceeded):
        beamsplitter_apply(TwoModeState(A, 2), BeamSplitterSetting())


# --------- Inmersión y traza parcial ----------
def test_embedding_of_trunc_ground_state():
    cs = build_cs(FAMILY_L_MINUS, truncated_oscillator_spec(), 0.0, truncation=8)
    estado = embed_cs_in_two_modes(cs, cutoff=20)
    A = estado.amplitudes
    assert estado.size == two_mode_size(20) == 39
    assert A[1, 1] == pytest.approx(2.0)
    assert np.sum(np.abs(A)) == pytest.approx(2.0)


def test_embedding_needs_room():
    cs = build_cs(FAMILY_L_MINUS, truncated_oscillator_spec(), 0.5, truncation=16)
    with pytest.raises(CutoffExceeded):
        embed_cs_in_two_modes(cs, cutoff=20)


def test_expand_halfline_recovers_trunc_state():
    coef, norma = expand_halfline(lambda x: eigenfunction(2, x), 16)
    assert coef[5] == pytest.approx(math.sqrt(2.0), abs=1e-10)
    assert norma == pytest.approx(1.0, abs=1e-10)


def test_expand_halfline_new_ground(model):
    _, norma = expand_halfline(new_eigenfunction(model, 0), 96)
    assert norma == pytest.approx(1.0, abs=1e-6)


def test_expand_halfline_new_ground_short_cutoff(model):
    # a 64 niveles falta norma del orden de 1e-6
    _, norma = expand_halfline(new_eigenfunction(model, 0), 64)
    assert 1.0 - 1e-4 < norma < 1.0


def test_resolve_cutoff_raises_for_new(model):
    cs = truncated_cs(NEW, 0.5, model=model)
    corte = resolve_cutoff(cs, 64, model)
    assert 64 < corte <= ENTROPY_CUTOFF_MAX
    _, norma = expand_halfline(new_eigenfunction(model, 0), corte)
    assert norma >= 1.0 - 1e-6


def test_resolve_cutoff_keeps_trunc():
    cs = truncated_cs(FAMILY_L_MINUS, 0.5)
    assert resolve_cutoff(cs, 48) == 48


def test_product_state_is_pure():
    cs = build_cs(FAMILY_L_MINUS, truncated_oscillator_spec(), 0.8, truncation=20)
    estado = embed_cs_in_two_modes(cs, cutoff=44)
    # norma 2 en toda la recta: cada modo vive en la semirrecta
    assert estado.full_norm() == pytest.approx(2.0)
    rho = reduced_density(estado)
    assert np.real(np.trace(rho)) == pytest.approx(1.0)
    assert np.real(np.trace(rho @ rho)) == pytest.approx(1.0, abs=1e-10)
    assert linear_entropy(rho) == pytest.approx(0.0, abs=1e-10)


def test_hom_output_is_mixed_on_halfline():
    salida = beamsplitter_apply(_two_mode({(1, 1): 1.0}), BeamSplitterSetting())
    rho = reduced_density(salida, gram_matrix(salida.size))
    assert np.real(np.trace(rho @ rho)) < 1.0 - 1e-3


def test_reduced_density_gram_size_mismatch():
    with pytest.raises(ValueError):
        reduced_density(_two_mode({(0, 0): 1.0}), GramMatrix(np.eye(3)))


def test_linear_entropy_values():
    assert linear_entropy(np.eye(2) / 2.0) == pytest.approx(0.5)
    assert linear_entropy(np.diag([1.0, 0.0])) == 0.0


# --------- Entropía ----------
def test_entropy_without_mixing():
    s = entropy_of(truncated_cs(FAMILY_L_MINUS, 1.0), BeamSplitterSetting(0.0, 0.0))
    assert abs(s) < 1e-8


def test_truncated_cs_sources(model):
    assert truncated_cs(FAMILY_L_MINUS, 0.5).truncation == 20
    assert truncated_cs(ISO, 0.5, terms=10).truncation == 10
    assert truncated_cs(NEW, 0.5, model=model).truncation == 2
    with pytest.raises(FamilyMismatch):
        truncated_cs("OTRA", 0.5)


@pytest.mark.slow
def test_trunc_entropy_is_flat():
    puntos = entropy_scan(FAMILY_L_MINUS, np.linspace(0.0, 2.0, 5))
    S = [p.S for p in puntos]
    assert all(0.0 <= s < 1.0 for s in S)
    assert all(p.converged for p in puntos)
    assert max(S) - min(S) < 0.15


@pytest.mark.slow
def test_new_entropy_near_half(model):
    puntos = entropy_scan(NEW, [0.0, 0.5, 1.0, 2.0], model=model)
    assert all(abs(p.S - 0.5) < 0.2 for p in puntos)
    assert all(p.converged for p in puntos)


def test_entropy_csv_is_deterministic(tmp_path):
    puntos = entropy_scan(FAMILY_L_MINUS, [0.0, 0.5], BeamSplitterSetting(0.0, 0.0), cutoff=48)
    a = write_entropy_csv(tmp_path / "a.csv", puntos, config={"x": 1})
    b = write_entropy_csv(tmp_path / "b.csv", puntos, config={"x": 1})
    assert open(a, "rb").read() == open(b, "rb").read()
    comentario, cabecera, filas = read_csv(a)
    assert cabecera == ["z_abs", "theta", "phi", "S", "S_converged", "cutoff"]
    assert filas[0][4] == "true"
    assert "basis=48" in comentario
