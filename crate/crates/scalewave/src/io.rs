//! CSV formats. Floats are written as `{:.16e}` (17 significant digits),
//! missing values as `NaN`, lines end in `\n`.

use std::io::{Read, Write};

use scalewave_core::analysis::{Classification, SweepRow};
use scalewave_core::{RunOutcome, RunReport};

use crate::error::{CliError, Result};

pub const SAMPLE_COLUMNS: [&str; 9] = [
    "t", "sup", "l2", "grad_l2", "ut_l2", "wl2", "wgrad_l2", "wenergy", "F",
];

pub const SWEEP_COLUMNS: [&str; 12] = [
    "n",
    "mu1",
    "mu2sq",
    "p",
    "amplitude",
    "outcome",
    "blowup_time",
    "classification",
    "l2_exponent",
    "grad_exponent",
    "p_crit",
    "regime",
];

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    fmt_f64(x.unwrap_or(f64::NAN))
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_samples<W: Write>(report: &RunReport, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(SAMPLE_COLUMNS)?;
    for s in &report.samples {
        w.write_record([
            fmt_f64(s.t),
            fmt_f64(s.sup),
            fmt_f64(s.l2),
            fmt_f64(s.grad_l2),
            fmt_f64(s.ut_l2),
            fmt_opt(s.wl2),
            fmt_opt(s.wgrad_l2),
            fmt_opt(s.wenergy),
            fmt_opt(s.f_value),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn outcome_name(o: &RunOutcome) -> &'static str {
    match o {
        RunOutcome::Completed => "completed",
        RunOutcome::BlowUp { .. } => "blow_up",
        RunOutcome::Diverged { .. } => "diverged",
    }
}

fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::GlobalLooking => "global_looking",
        Classification::BlowUp => "blow_up",
        Classification::Undecided => "undecided",
    }
}

/// One line per row. `regime` is `thm22`, `thm23`, `none`, or `error:<msg>`
/// when the run could not be set up.
pub fn write_sweep<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        let regime = match (&r.error, r.thm22_applicable, r.thm23_applicable) {
            (Some(e), _, _) => format!("error:{e}"),
            (None, true, _) => "thm22".into(),
            (None, false, true) => "thm23".into(),
            (None, false, false) => "none".into(),
        };
        w.write_record([
            r.params.n.to_string(),
            fmt_f64(r.params.mu1),
            fmt_f64(r.params.mu2sq),
            fmt_f64(r.params.p),
            fmt_f64(r.amplitude),
            outcome_name(&r.outcome).to_string(),
            fmt_opt(r.blowup_time),
            classification_name(r.classification).to_string(),
            fmt_opt(r.l2_exponent),
            fmt_opt(r.grad_exponent),
            fmt_opt(r.p_crit),
            regime,
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(t, column)` pairs from a CSV with a header containing `t` and
/// `column`. Rows whose value is `NaN` are dropped.
pub fn read_series<R: Read>(input: R, column: &str) -> Result<Vec<(f64, f64)>> {
    let mut rd = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(input);
    let header = rd.headers()?.clone();
    let find = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| {
            CliError::Usage(format!(
                "column {name:?} not in header {:?}",
                header.iter().collect::<Vec<_>>()
            ))
        })
    };
    let (ti, vi) = (find("t")?, find(column)?);
    let mut out = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            let field = rec.get(i).unwrap_or("");
            field.parse::<f64>().map_err(|_| {
                CliError::Usage(format!(
                    "row {}: cannot parse {field:?} as a number",
                    line + 2
                ))
            })
        };
        let (t, v) = (parse(ti)?, parse(vi)?);
        if !v.is_nan() {
            out.push((t, v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use scalewave_core::solver::Sample;
    use scalewave_core::{ModelParams, RunConfig};

    fn report() -> RunReport {
        let cfg = RunConfig::new(ModelParams::new(1, 1.0, 0.0, 2.0).unwrap(), 1.0);
        let s = |t: f64, f: Option<f64>| Sample {
            t,
            sup: 0.5,
            l2: 1.0 / 3.0,
            grad_l2: 0.0,
            ut_l2: 1e-300,
            wl2: f,
            wgrad_l2: None,
            wenergy: f,
            f_value: f,
        };
        RunReport {
            config: cfg,
            dt: 0.5,
            steps: 2,
            samples: vec![s(0.0, Some(2.0)), s(1.0, None)],
            outcome: RunOutcome::Completed,
            blowup_time: None,
            warnings: vec![],
        }
    }

    #[test]
    fn sample_csv_layout() {
        let mut buf = Vec::new();
        write_samples(&report(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "t,sup,l2,grad_l2,ut_l2,wl2,wgrad_l2,wenergy,F");
        assert_eq!(
            lines[1],
            "0.0000000000000000e0,5.0000000000000000e-1,3.3333333333333331e-1,0.0000000000000000e0,\
             1.0000000000000000e-300,2.0000000000000000e0,NaN,2.0000000000000000e0,2.0000000000000000e0"
        );
        assert!(lines[2].ends_with(",NaN,NaN,NaN,NaN"));
        assert_eq!(lines[3], "");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn formatting_roundtrips_exactly() {
        for x in [
            1.0 / 3.0,
            std::f64::consts::PI * 1e-17,
            6.02214076e23,
            -0.0,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn read_back_written_series() {
        let mut buf = Vec::new();
        write_samples(&report(), &mut buf).unwrap();
        assert_eq!(
            read_series(&buf[..], "l2").unwrap(),
            vec![(0.0, 1.0 / 3.0), (1.0, 1.0 / 3.0)]
        );
        assert_eq!(read_series(&buf[..], "F").unwrap(), vec![(0.0, 2.0)]);
        assert!(matches!(
            read_series(&buf[..], "energy"),
            Err(CliError::Usage(_))
        ));
        assert!(read_series(&b"t,l2\n1,x\n"[..], "l2").is_err());
    }
}
