import json
import math

import numpy as np
import pytest

from t2pair.errors import (
    DimensionOutOfRange,
    DivergentRegime,
    DomainError,
    NonPositiveParameter,
)
from t2pair.model import (
    CattaneoParams,
    DrivenGaussianOccupation,
    GaplessDispersion,
    GappedDispersion,
    MomentumGrid,
    NvParams,
    ParametricDriveOccupation,
    ProbeGeometry,
    ProtocolKind,
    SpaceTimeMap,
    TabulatedDispersion,
    ThermalOccupation,
    from_dict,
    to_dict,
    validate,
    validation_errors,
)


class TestValidation:
    def test_gapped_ok(self):
        assert validate(GappedDispersion(omega0=1.0, c=1.0))

    def test_gapless_ir_divergent_dimension(self):
        with pytest.raises(DivergentRegime):
            validate(GaplessDispersion(alpha=1.0, z=2.0), dimension=1)
        # fine when the dimension is large enough
        validate(GaplessDispersion(alpha=1.0, z=2.0), dimension=3)

    def test_cattaneo_zero_tau(self):
        with pytest.raises(NonPositiveParameter):
            validate(CattaneoParams(tau_D=0.0))

    def test_error_list_carries_field_paths(self):
        errors = validation_errors(CattaneoParams(tau_D=-1.0, chi0=0.0))
        paths = [msg for _, msg in errors]
        assert any("cattaneo.tau_D" in p for p in paths)
        assert any("cattaneo.chi0" in p for p in paths)

    def test_dimension_out_of_range(self):
        with pytest.raises(DimensionOutOfRange):
            validate(ProbeGeometry(dimension=5))

    def test_momentum_grid(self):
        with pytest.raises(DomainError):
            validate(MomentumGrid(k_min=2.0, k_max=1.0))
        with pytest.raises(NonPositiveParameter):
            validate(MomentumGrid(k_min=0.0, k_max=1.0, spacing="log"))

    def test_driven_sigma(self):
        with pytest.raises(NonPositiveParameter):
            validate(DrivenGaussianOccupation(T=1.0, amplitude=1.0, k_dr=0.0,
                                              sigma_dr=0.0))


class TestDerivedQuantities:
    def test_cattaneo_rates(self):
        p = CattaneoParams(c=2.0, tau_D=0.5, tau_s=50.0)
        assert p.gamma_D == pytest.approx(2.0, rel=1e-15)
        assert p.gamma_s == pytest.approx(0.02, rel=1e-15)
        assert p.gamma == pytest.approx(2.02, rel=1e-15)
        assert p.tau_tilde == pytest.approx(1.0 / 2.02, rel=1e-15)
        assert p.Gamma_sq(3.0) == pytest.approx((2.0 * 3.0) ** 2 + 2.0 * 0.02,
                                                rel=1e-15)
        assert p.diffusion_constant == pytest.approx(4.0 * 0.5, rel=1e-15)
        assert p.diffusion_length == pytest.approx(math.sqrt(2.0 * 50.0), rel=1e-15)

    def test_nv_default_prefactor_squares_the_kernel(self):
        nv = NvParams(base=CattaneoParams(chi0=2.0), d=1.0)
        assert nv.prefactor == pytest.approx(0.25 * 2.0, rel=1e-15)
        assert NvParams(d=1.0, kernel_prefactor=3.0).prefactor == 3.0


class TestProtocolKind:
    def test_parse_aliases(self):
        assert ProtocolKind.parse("lse") is ProtocolKind.LOCAL_SPIN_ECHO
        assert ProtocolKind.parse("Ramsey") is ProtocolKind.RAMSEY
        with pytest.raises(DomainError):
            ProtocolKind.parse("cpmg")

    def test_fp_flags(self):
        assert ProtocolKind.RAMSEY.fp_flags == (False, False)
        assert ProtocolKind.LOCAL_SPIN_ECHO.fp_flags == (False, True)
        assert ProtocolKind.GLOBAL_SPIN_ECHO.fp_flags == (True, True)

    def test_sign_function(self):
        tau = np.array([0.0, 0.49, 0.51, 1.0])
        np.testing.assert_array_equal(
            ProtocolKind.sign_function(tau, 1.0), [1.0, 1.0, -1.0, -1.0]
        )


class TestTabulatedDispersion:
    def test_interpolation_hits_samples_and_stays_monotone(self):
        disp = TabulatedDispersion((0.0, 1.0, 2.0, 4.0), (1.0, 1.5, 3.0, 3.5))
        ks = np.linspace(0.0, 4.0, 200)
        w = disp.omega(ks)
        assert np.all(np.diff(w) >= -1e-12)
        assert disp.omega(1.0) == pytest.approx(1.5, abs=1e-14)
        assert disp.omega(4.0) == pytest.approx(3.5, abs=1e-14)

    def test_extrapolation_is_an_error(self):
        disp = TabulatedDispersion((0.0, 1.0), (1.0, 2.0))
        with pytest.raises(DomainError):
            disp.omega(1.5)

    def test_unsorted_samples_rejected(self):
        bad = TabulatedDispersion((0.0, 2.0, 1.0), (1.0, 2.0, 3.0))
        assert validation_errors(bad)


class TestSerialization:
    SAMPLES = [
        GappedDispersion(0.123456789012345, 0.987654321098765),
        GaplessDispersion(1.0 / 3.0, 2.0),
        TabulatedDispersion((0.0, 0.1, 0.7), (0.3, 1.0 / 7.0, 2.5)),
        ThermalOccupation(1e-3),
        DrivenGaussianOccupation(1.0, 10.0, 3.0, 0.1),
        ParametricDriveOccupation(0.1, 0.2, 2.0, 5.0),
        MomentumGrid(1e-9, 30.0, 2049, "log"),
        CattaneoParams(c=math.pi, tau_D=1 / 3, tau_s=100.0, chi0=1.0, T=2.0,
                       Lambda=50.0, a=0.1),
        NvParams(d=1.7, kernel_prefactor=None),
        ProbeGeometry(dimension=3, r=2.5, lambda1=0.7, lambda2=-0.3, delta=1.1),
    ]

    @pytest.mark.parametrize("spec", SAMPLES, ids=lambda s: type(s).__name__)
    def test_json_roundtrip_bit_exact(self, spec):
        back = from_dict(json.loads(json.dumps(to_dict(spec))))
        assert back == spec

    def test_protocol_roundtrip(self):
        for kind in ProtocolKind:
            assert from_dict(json.loads(json.dumps(to_dict(kind)))) is kind


class TestSpaceTimeMap:
    def _map(self, **kw):
        base = dict(
            r_values=(0.0, 1.0),
            t_values=(0.5, 1.0, 2.0),
            values=((0.1, 0.2, 0.3), (0.0, 0.1, 0.2)),
            quantity="n12",
            metadata={"tol": 1e-7},
        )
        base.update(kw)
        return SpaceTimeMap(**base)

    def test_valid_map_roundtrips(self):
        m = self._map()
        m.check()
        assert from_dict(json.loads(json.dumps(to_dict(m)))) == m

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            self._map(values=((0.1, 0.2), (0.3, 0.4))).check()

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            self._map(values=((0.1, math.inf, 0.3), (0.0, 0.1, 0.2))).check()

    def test_unknown_quantity(self):
        with pytest.raises(DomainError):
            self._map(quantity="bogus").check()
