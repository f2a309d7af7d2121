use scalewave_core::analysis::{self, Classification, ClassifyCriteria, SweepPlan};
use scalewave_core::profile::RadialProfile;
use scalewave_core::{ModelParams, RunConfig};

fn plan(p_values: Vec<f64>, amplitudes: Vec<f64>) -> SweepPlan {
    let bump = RadialProfile::Bump { amplitude: 1.0, radius: 2.0 };
    SweepPlan {
        r_max: 230.0,
        dr: 0.05,
        config: RunConfig::new(ModelParams::new(1, 4.0, 0.0, 2.0).unwrap(), 200.0),
        u0: bump,
        u1: bump,
        p_values,
        amplitudes,
        criteria: ClassifyCriteria::default(),
    }
}

#[test]
fn below_critical_blows_up() {
    let rows = analysis::sweep(&plan(vec![1.5, 2.0, 2.5], vec![1.0]));
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert_eq!(r.classification, Classification::BlowUp, "p = {}", r.params.p);
        assert!(r.blowup_time.is_some_and(|t| t < 200.0));
        assert!(r.thm23_applicable && r.p_crit == Some(3.0));
    }
}

#[test]
fn above_critical_small_data_is_global_looking() {
    let rows = analysis::sweep(&plan(vec![3.5, 4.0], vec![0.01]));
    for r in &rows {
        assert_eq!(r.classification, Classification::GlobalLooking, "p = {}", r.params.p);
        assert!(r.thm22_applicable);
        assert!((r.l2_exponent.unwrap() + 0.5).abs() < 0.2);
    }
}

#[test]
fn mixed_sweep_is_monotone_in_p() {
    let rows = analysis::sweep(&plan(vec![2.0, 2.5, 3.5, 4.0], vec![0.01]));
    assert!(analysis::sweep_is_monotone(&rows));
    assert!(analysis::sweep(&plan(vec![], vec![1.0])).is_empty());
}
