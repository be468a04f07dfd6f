import numpy as np
import pytest

from magtorus import (
    DirectionalProfile,
    F_coeff,
    FourierField2D,
    G_coeff,
    MonotonicityError,
    PrimitiveDirection,
    assemble_field,
    build_monotone_map,
    coefficient_errors,
    compute_invariant_set,
    invert_invariants,
    random_admissible_field,
    random_mean_zero_field,
    recover_Bdelta,
    recover_Vdelta,
    roundtrip,
    synthesize_sprime,
)


def forward_F(profile_a1, b0, K, N=4096, l=1):
    return np.array([F_coeff(profile_a1, b0, l, k, N) for k in range(1, K + 1)])


def cosine_Bdelta(c):
    # B_delta = 2c cos(2 pi s); A1_delta = (c/pi) sin(2 pi s)
    return DirectionalProfile({1: complex(c), -1: complex(c)})


def antiderivative(prof):
    from magtorus import profile_antiderivative

    return profile_antiderivative(prof)


def test_synthesize_sprime_trivial():
    sp = synthesize_sprime(np.zeros(8, dtype=complex), 64)
    assert np.array_equal(sp, np.ones(64))
    with pytest.raises(ValueError, match="4K"):
        synthesize_sprime(np.zeros(8, dtype=complex), 16)


def test_synthesize_sprime_mean_is_one():
    rng = np.random.default_rng(0)
    F = 0.01 * (rng.standard_normal(16) + 1j * rng.standard_normal(16))
    sp = synthesize_sprime(F, 128)
    assert abs(sp.mean() - 1.0) <= 1e-12


def test_synthesize_sprime_matches_forward_map():
    # forward map y(s) = s + alpha sin(2 pi s): s'(y) = 1/(1 + 2 pi alpha cos(2 pi s))
    alpha, b0 = 0.05, 2.0
    a1 = antiderivative(cosine_Bdelta(np.pi * alpha * b0))  # A1/b0 = alpha sin
    F = forward_F(a1, b0, 64)
    sp = synthesize_sprime(F, 512)
    mp = build_monotone_map(sp)
    s = np.arange(512) / 512
    y = s + alpha * np.sin(2 * np.pi * s)
    want = 1.0 / (1.0 + 2 * np.pi * alpha * np.cos(2 * np.pi * s))
    assert np.max(np.abs(mp.sprime_at(y) - want)) <= 1e-10


def test_synthesize_sprime_reports_violation():
    # a density with a negative dip: F_1 = 0.6 makes min s' = 1 - 1.2 < 0
    F = np.zeros(4, dtype=complex)
    F[0] = 0.6
    with pytest.raises(MonotonicityError) as err:
        synthesize_sprime(F, 64)
    assert err.value.min_value < 0


def test_identity_map():
    mp = build_monotone_map(np.ones(64))
    assert np.allclose(mp.y_of_s, np.arange(64) / 64, atol=1e-13)
    assert np.allclose(mp.s_of_y, np.arange(64) / 64, atol=1e-13)
    prof = recover_Bdelta(mp, 5.0)
    assert all(abs(c) <= 1e-13 for c in prof.coeffs.values())


def test_bisection_oracle():
    # invert s(y) = y + 0.1 sin(2 pi y) at target 0.05; M = 640 puts the
    # target on the grid. Plain bisection as the independent root finder.
    M = 640
    y = np.arange(M) / M
    sp = 1.0 + 0.2 * np.pi * np.cos(2 * np.pi * y)
    mp = build_monotone_map(sp)

    lo, hi = -0.4, 0.6
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid + 0.1 * np.sin(2 * np.pi * mid) < 0.05:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    assert root == pytest.approx(0.0308, abs=5e-5)  # the pinned value
    assert mp.y_of_s[32] == pytest.approx(root, abs=1e-9)


def test_map_contracts(rng):
    F = 0.02 * (rng.standard_normal(12) + 1j * rng.standard_normal(12))
    sp = synthesize_sprime(F, 128)
    mp = build_monotone_map(sp)
    sgrid = np.arange(128) / 128
    assert np.max(np.abs(mp.s_at(mp.y_of_s) - sgrid)) <= 1e-9
    assert np.all(np.diff(mp.y_of_s) > 0)
    y = rng.uniform(-2, 2, 40)
    assert np.max(np.abs(mp.s_at(y + 1.0) - mp.s_at(y) - 1.0)) <= 1e-12


def test_single_harmonic_round_trip():
    b0 = 2 * np.pi / 1.1
    c = 0.3 * abs(b0)
    prof = cosine_Bdelta(c / 2)  # b_{+-1} = c/2
    F = forward_F(antiderivative(prof), b0, 48)
    mp = build_monotone_map(synthesize_sprime(F, 256))
    rec = recover_Bdelta(mp, b0, kmax=8)
    assert abs(rec.coeffs[1] - c / 2) <= 1e-9 * abs(c / 2)
    assert rec.coeffs[-1] == rec.coeffs[1].conjugate()
    # mean-zero pinning of the recovered antiderivative
    a1_mean = np.mean(b0 * (mp.y_of_s - np.arange(256) / 256))
    assert abs(a1_mean) <= 1e-12


def test_recover_V_identity_map():
    G = np.array([0.2 - 0.1j, 0.05j, 0.0, 0.01])
    mp = build_monotone_map(np.ones(64))
    prof = recover_Vdelta(G, mp)
    for k, g in enumerate(G, start=1):
        assert abs(prof.coeffs[k] - g) <= 1e-13
    zero = recover_Vdelta(np.zeros(4, dtype=complex), mp)
    assert all(abs(c) <= 1e-15 for c in zero.coeffs.values())


def test_recover_V_generic_round_trip():
    b0 = 2 * np.pi / 1.1
    a1 = antiderivative(cosine_Bdelta(0.2 * abs(b0)))
    vprof = DirectionalProfile({1: 0.4 + 0.1j, -1: 0.4 - 0.1j, 3: -0.2j, -3: 0.2j})
    K = 48
    F = forward_F(a1, b0, K)
    G = np.array([G_coeff(vprof, a1, b0, k, 4096) for k in range(1, K + 1)])
    mp = build_monotone_map(synthesize_sprime(F, 256))
    rec = recover_Vdelta(G, mp)
    for p, c in vprof.coeffs.items():
        assert abs(rec.coeffs[p] - c) <= 1e-8


def test_monotonicity_iff_hypothesis():
    # single-harmonic B: the synthesis fails exactly when 2c >= |b0|
    b0 = 2 * np.pi / 1.1
    for frac, ok in ((0.9, True), (1.05, False)):
        c = frac * abs(b0) / 2
        F = forward_F(antiderivative(cosine_Bdelta(c)), b0, 64, N=8192)
        if ok:
            sp = synthesize_sprime(F, 512)
            assert sp.min() > 0
        else:
            with pytest.raises(MonotonicityError):
                build_monotone_map(synthesize_sprime(F, 512))


def test_assemble_field(skew):
    profiles = {
        PrimitiveDirection(1, 0): DirectionalProfile({1: 1 + 1j, -1: 1 - 1j}),
        PrimitiveDirection(0, 1): DirectionalProfile({2: 0.5, -2: 0.5}),
    }
    B = assemble_field(profiles, skew, 3.0)
    assert set(B.coeffs) == {(1, 0), (-1, 0), (0, 2), (0, -2)}
    assert B.mean == 3.0
    assert assemble_field({}, skew, 1.0).coeffs == {}
    clash = {
        PrimitiveDirection(1, 0): DirectionalProfile({1: 1.0, -1: 1.0}),
        PrimitiveDirection(-1, 0): DirectionalProfile({1: 1.0, -1: 1.0}),
    }
    with pytest.raises(RuntimeError, match="duplicate"):
        assemble_field(clash, skew, 0.0)


def test_conjugate_direction_consistency():
    # F for the flipped representative is the conjugate array; recovering
    # from it yields the conjugated profile, i.e. the same 2-D coefficients
    b0 = 2 * np.pi / 1.1
    prof = DirectionalProfile({1: 0.2 + 0.1j, -1: 0.2 - 0.1j, 2: -0.07j, -2: 0.07j})
    prof = DirectionalProfile({p: c * abs(b0) for p, c in prof.coeffs.items()})
    F = forward_F(antiderivative(prof), b0, 48)
    rec = recover_Bdelta(build_monotone_map(synthesize_sprime(F, 256)), b0, kmax=4)
    rec_flip = recover_Bdelta(build_monotone_map(synthesize_sprime(np.conj(F), 256)),
                              b0, kmax=4)
    for p in (1, 2):
        assert abs(rec_flip.coeffs[p] - np.conj(rec.coeffs[p])) <= 1e-9


def test_invert_invariants_negative_flux(skew):
    B = random_admissible_field(5, skew, 2, 0.3, sign=-1)
    V = random_mean_zero_field(6, skew, 2)
    inv = compute_invariant_set(B, V, 2, 32)
    assert inv.l == -1
    B_rec, V_rec, _ = invert_invariants(inv, 192)
    bl, _ = coefficient_errors(B, B_rec)
    vl, _ = coefficient_errors(V, V_rec)
    assert bl <= 1e-9
    assert vl <= 1e-9
    assert B_rec.mean == B.mean


def test_monotonicity_error_names_direction(skew):
    b0 = 2 * np.pi / skew.area
    F = np.zeros(8, dtype=complex)
    F[0] = 0.7  # min s' < 0
    inv_like = compute_invariant_set(
        random_admissible_field(1, skew, 1, 0.5), random_mean_zero_field(2, skew, 1), 1, 8)
    inv_like.F[inv_like.directions[2]][:] = F
    with pytest.raises(MonotonicityError, match=r"direction \(1,0\)"):
        invert_invariants(inv_like, 64)


def test_roundtrip_constant_field(skew):
    B = FourierField2D(skew, 2 * np.pi / skew.area, {})
    V = FourierField2D(skew, 0.0, {})
    rep = roundtrip(B, V, max_primitive_norm=2, K=8, M=64)
    assert rep.b_error_linf == 0.0
    assert rep.v_error_linf == 0.0
    assert rep.margin > 0


def test_roundtrip_idempotent(skew):
    # K must be large enough that the discarded coefficient tail is below
    # the drift tolerance, else the second pass sees a different field
    B = random_admissible_field(17, skew, 2, 0.35)
    V = random_mean_zero_field(18, skew, 2)
    rep1 = roundtrip(B, V, max_primitive_norm=2, K=32, M=160)
    rep2 = roundtrip(rep1.B, rep1.V, max_primitive_norm=2, K=32, M=160)
    bl, _ = coefficient_errors(rep1.B, rep2.B)
    vl, _ = coefficient_errors(rep1.V, rep2.V)
    assert bl <= 1e-10
    assert vl <= 1e-10


def test_coefficient_errors_conventions(skew):
    lat = skew
    t = FourierField2D(lat, 1.0, {(1, 0): 0.5})
    r = FourierField2D(lat, 1.0, {(1, 0): 0.5 + 0.05j})
    linf, l2 = coefficient_errors(t, r)
    assert linf == pytest.approx(0.1)
    assert coefficient_errors(t, t) == (0.0, 0.0)
    const = FourierField2D(lat, 1.0, {})
    assert coefficient_errors(const, const) == (0.0, 0.0)


def test_report_shape(skew):
    B = random_admissible_field(19, skew, 2, 0.3)
    V = random_mean_zero_field(20, skew, 2)
    rep = roundtrip(B, V, max_primitive_norm=2, K=16, M=128)
    assert rep.K == 16
    assert len(rep.per_direction) == len(rep.directions) == 8
    assert all(eb >= 0 and ev >= 0 for eb, ev in rep.per_direction.values())
    from magtorus import format_report, report_rows

    text = format_report(rep)
    assert "(1,0)" in text and "K: 16" in text
    rows = report_rows(rep)
    assert len(rows) == 8 and all(len(r) == 4 for r in rows)
