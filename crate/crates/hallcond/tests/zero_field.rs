//! Zero-field free electron gas: no Hall response, no switching correction,
//! and ballistic acceleration `γ_yy = N/(LxLy)`.

use hallcond::geometry::{Direction, GaugePoint, TorusGeometry};
use hallcond::planewave::{PlaneWaveBasis, ZeroFieldGas};
use hallcond::response::{evolve_driven, EvolutionSettings, Occupation, SwitchingProtocol};

fn gas() -> ZeroFieldGas {
    let g = TorusGeometry::zero_field(5.0, 5.0).unwrap();
    ZeroFieldGas::new(PlaneWaveBasis::new(g, 2).unwrap(), 5).unwrap()
}

#[test]
fn closed_shell_response() {
    let gas = gas();
    let area = gas.basis.geometry.area();
    for phi in [GaugePoint::new(0.0, 0.0), GaugePoint::new(0.05, -0.03)] {
        let r = gas.response(phi).unwrap();
        assert_eq!(r.sigma_xy(), 0.0);
        assert_eq!(r.gamma_natural(Direction::X), 0.0);
        assert!((r.gamma_natural(Direction::Y) - 5.0 / area).abs() < 1e-10);
        for eta in [1e-1, 1e-2] {
            let p = SwitchingProtocol::new(1.0, eta, 15.0 / eta, 2.0).unwrap();
            assert_eq!(r.delta_sigma(Direction::X, &p).unwrap(), 0.0);
            assert_eq!(r.delta_sigma(Direction::Y, &p).unwrap(), 0.0);
        }
    }
}

#[test]
fn current_grows_linearly_in_time() {
    let gas = gas();
    let phi = GaugePoint::new(0.0, 0.0);
    let (spec, vx, vy) = gas.spectral(phi);
    let area = gas.basis.geometry.area();
    let f = 1e-3;
    let protocol = SwitchingProtocol::new(f, 0.5, 30.0, 0.0).unwrap();
    let settings = EvolutionSettings { dt: 0.01, t_end: 3.0, stride_before: 100, stride_after: 10 };
    let trace = evolve_driven(&spec, &vx, &vy, Occupation::FermiSea(5), area, &protocol, &settings).unwrap();
    for ((t, jx), jy) in trace.times.iter().zip(&trace.jx).zip(&trace.jy) {
        assert!(jx.abs() < 1e-14);
        if *t > 0.0 {
            assert!((jy - 5.0 * f * t / area).abs() < 1e-12, "t={t}: {jy}");
        }
    }
}
