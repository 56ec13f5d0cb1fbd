//! CSV artifacts. Every writer has a matching reader, and floating-point
//! values are written in plain decimal notation with 17 significant digits
//! so that a write/read cycle is bit-exact.

use crate::bath::BathRealization;
use crate::dynamics::{Method, Trajectory};
use crate::modes::{GroundState, PhasePoint};
use crate::potentials::ForceScanRow;
use std::io::{BufRead, BufReader, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("malformed file: {0}")]
    Format(String),
}

type Result<T> = std::result::Result<T, IoError>;

fn bad(msg: impl Into<String>) -> IoError {
    IoError::Format(msg.into())
}

/// Formats `v` positionally with exactly 17 significant digits.
///
/// ```
/// use mqs_core::io::format_decimal;
/// assert_eq!(format_decimal(1.5), "1.5000000000000000");
/// assert_eq!(format_decimal(-2.5e-3), "-0.0025000000000000001");
/// ```
pub fn format_decimal(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0" } else { "0.0" }.to_string();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in scientific format");
    let exp: i64 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|&c| c != '.').collect();
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{digits}", "0".repeat((-point) as usize))
    } else if point as usize >= digits.len() {
        format!("{digits}{}.0", "0".repeat(point as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(point as usize);
        format!("{int}.{frac}")
    };
    format!("{sign}{body}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| bad(format!("not a number: `{s}`")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| bad(format!("not an index: `{s}`")))
}

fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = rdr.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(bad(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn numeric_rows(rdr: &mut csv::Reader<impl Read>, width: usize) -> Result<Vec<Vec<f64>>> {
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() != width {
                return Err(bad(format!(
                    "row has {} fields, expected {width}",
                    rec.len()
                )));
            }
            rec.iter().map(parse_f64).collect()
        })
        .collect()
}

// ---- bath ----

/// One row of the bath table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathRow {
    pub alpha: usize,
    pub omega: f64,
    pub gamma: f64,
    pub gamma_bar: f64,
    pub weight: f64,
}

pub const BATH_HEADER: [&str; 5] = ["alpha", "omega", "gamma", "gamma_bar", "weight"];

pub fn bath_rows(bath: &BathRealization) -> Vec<BathRow> {
    (0..bath.len())
        .map(|a| BathRow {
            alpha: a + 1,
            omega: bath.omega()[a],
            gamma: bath.gamma()[a],
            gamma_bar: bath.gamma_bar()[a],
            weight: bath.weight(a),
        })
        .collect()
}

pub fn write_bath_csv<W: Write>(out: W, bath: &BathRealization) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BATH_HEADER)?;
    for r in bath_rows(bath) {
        w.write_record([
            r.alpha.to_string(),
            format_decimal(r.omega),
            format_decimal(r.gamma),
            format_decimal(r.gamma_bar),
            format_decimal(r.weight),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_bath_csv<R: Read>(input: R) -> Result<Vec<BathRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &BATH_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() != 5 {
                return Err(bad("bath row needs 5 fields"));
            }
            Ok(BathRow {
                alpha: parse_usize(&rec[0])?,
                omega: parse_f64(&rec[1])?,
                gamma: parse_f64(&rec[2])?,
                gamma_bar: parse_f64(&rec[3])?,
                weight: parse_f64(&rec[4])?,
            })
        })
        .collect()
}

// ---- normal modes ----

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeRow {
    pub alpha: usize,
    pub theta: f64,
    pub omega_plus: f64,
    pub omega_minus: f64,
}

pub const MODES_HEADER: [&str; 4] = ["alpha", "theta", "omega_plus", "omega_minus"];

pub fn write_modes_csv<W: Write>(out: W, gs: &GroundState) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MODES_HEADER)?;
    for (a, m) in gs.modes().iter().enumerate() {
        w.write_record([
            (a + 1).to_string(),
            format_decimal(m.theta),
            format_decimal(m.omega_plus),
            format_decimal(m.omega_minus),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_modes_csv<R: Read>(input: R) -> Result<Vec<ModeRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &MODES_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() != 4 {
                return Err(bad("mode row needs 4 fields"));
            }
            Ok(ModeRow {
                alpha: parse_usize(&rec[0])?,
                theta: parse_f64(&rec[1])?,
                omega_plus: parse_f64(&rec[2])?,
                omega_minus: parse_f64(&rec[3])?,
            })
        })
        .collect()
}

// ---- ground-state samples ----

fn samples_header(n: usize, with_momenta: bool) -> Vec<String> {
    let mut h = vec!["sample_id".to_string(), "q".to_string()];
    h.extend((1..=n).map(|a| format!("x_{a}")));
    if with_momenta {
        h.push("p".to_string());
        h.extend((1..=n).map(|a| format!("p_{a}")));
    }
    h
}

/// Writes `sample_id,q,x_1..x_N`, followed by `p,p_1..p_N` when
/// `with_momenta` is set.
pub fn write_samples_csv<W: Write>(
    out: W,
    samples: &[PhasePoint],
    with_momenta: bool,
) -> Result<()> {
    let n = samples.first().map_or(0, PhasePoint::n_modes);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(samples_header(n, with_momenta))?;
    for (id, s) in samples.iter().enumerate() {
        if s.n_modes() != n {
            return Err(bad("samples have differing numbers of modes"));
        }
        let mut rec = vec![id.to_string(), format_decimal(s.q)];
        rec.extend(s.x.iter().map(|&v| format_decimal(v)));
        if with_momenta {
            rec.push(format_decimal(s.p));
            rec.extend(s.p_bath.iter().map(|&v| format_decimal(v)));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads either sample layout; momenta are zero when absent. Returns the
/// samples and whether momenta were present.
pub fn read_samples_csv<R: Read>(input: R) -> Result<(Vec<PhasePoint>, bool)> {
    let mut rdr = csv::Reader::from_reader(input);
    let width = rdr.headers()?.len();
    let with_momenta = rdr.headers()?.iter().any(|h| h == "p");
    let n = if with_momenta {
        (width - 3) / 2
    } else {
        width.saturating_sub(2)
    };
    check_header(
        &mut rdr,
        &samples_header(n, with_momenta)
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>(),
    )?;
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != width {
            return Err(bad(format!("sample row has {} fields", rec.len())));
        }
        if parse_usize(&rec[0])? != k {
            return Err(bad(format!("sample ids out of order at row {k}")));
        }
        let vals: Vec<f64> = rec.iter().skip(1).map(parse_f64).collect::<Result<_>>()?;
        let mut point = PhasePoint {
            q: vals[0],
            p: 0.0,
            x: vals[1..=n].to_vec(),
            p_bath: vec![0.0; n],
        };
        if with_momenta {
            point.p = vals[n + 1];
            point.p_bath = vals[n + 2..].to_vec();
        }
        out.push(point);
    }
    Ok((out, with_momenta))
}

// ---- trajectories ----

/// Metadata carried by the comment line of a trajectory file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMeta {
    pub method: Method,
    pub dt: f64,
    pub seed: Option<u64>,
}

pub fn write_trajectory_csv<W: Write>(
    mut out: W,
    traj: &Trajectory,
    seed: Option<u64>,
) -> Result<()> {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    writeln!(
        out,
        "# method={} dt={} seed={seed}",
        traj.label,
        format_decimal(traj.dt)
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "q", "qdot"])?;
    for (k, (q, v)) in traj.q.iter().zip(&traj.qdot).enumerate() {
        w.write_record([
            format_decimal(traj.time(k)),
            format_decimal(*q),
            format_decimal(*v),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_meta(line: &str) -> Result<TrajectoryMeta> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| bad("trajectory file must start with a `# method=...` line"))?;
    let (mut method, mut dt, mut seed) = (None, None, None);
    for tok in body.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| bad(format!("bad metadata token `{tok}`")))?;
        match k {
            "method" => method = Some(v.parse::<Method>().map_err(bad)?),
            "dt" => dt = Some(parse_f64(v)?),
            "seed" => {
                seed = Some(if v == "none" {
                    None
                } else {
                    Some(v.parse().map_err(|_| bad(format!("bad seed `{v}`")))?)
                })
            }
            _ => return Err(bad(format!("unknown metadata key `{k}`"))),
        }
    }
    Ok(TrajectoryMeta {
        method: method.ok_or_else(|| bad("metadata lacks method"))?,
        dt: dt.ok_or_else(|| bad("metadata lacks dt"))?,
        seed: seed.ok_or_else(|| bad("metadata lacks seed"))?,
    })
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<(Trajectory, TrajectoryMeta)> {
    let mut input = BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    let meta = parse_meta(first.trim_end())?;
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &["t", "q", "qdot"])?;
    let rows = numeric_rows(&mut rdr, 3)?;
    let t0 = rows.first().ok_or_else(|| bad("empty trajectory"))?[0];
    let (mut q, mut qdot) = (
        Vec::with_capacity(rows.len()),
        Vec::with_capacity(rows.len()),
    );
    for (k, r) in rows.iter().enumerate() {
        let expected = t0 + k as f64 * meta.dt;
        if (r[0] - expected).abs() > 1e-9 * expected.abs().max(1.0) {
            return Err(bad(format!("row {k}: t = {} is off the dt grid", r[0])));
        }
        q.push(r[1]);
        qdot.push(r[2]);
    }
    let traj =
        Trajectory::new(meta.dt, t0, q, qdot, meta.method).map_err(|e| bad(e.to_string()))?;
    Ok((traj, meta))
}

// ---- force scans ----

#[derive(Debug, Clone, PartialEq)]
pub struct ForceScanRecord {
    pub q: f64,
    pub x_slice_spec: String,
    pub potential: f64,
    pub quantum_potential: f64,
    pub force: f64,
}

pub const FORCE_HEADER: [&str; 5] = ["q", "x_slice_spec", "V", "Q", "force"];

/// `x_slice_spec` labels the fixed bath configuration of the scan.
pub fn write_force_scan_csv<W: Write>(
    out: W,
    rows: &[ForceScanRow],
    x_slice_spec: &str,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FORCE_HEADER)?;
    for r in rows {
        w.write_record([
            format_decimal(r.q),
            x_slice_spec.to_string(),
            format_decimal(r.classical),
            format_decimal(r.quantum),
            format_decimal(r.force),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_force_scan_csv<R: Read>(input: R) -> Result<Vec<ForceScanRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &FORCE_HEADER)?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() != 5 {
                return Err(bad("force row needs 5 fields"));
            }
            Ok(ForceScanRecord {
                q: parse_f64(&rec[0])?,
                x_slice_spec: rec[1].to_string(),
                potential: parse_f64(&rec[2])?,
                quantum_potential: parse_f64(&rec[3])?,
                force: parse_f64(&rec[4])?,
            })
        })
        .collect()
}

// ---- memory kernel ----

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRow {
    pub t: f64,
    pub discrete: f64,
    pub continuum: f64,
}

pub const KERNEL_HEADER: [&str; 3] = ["t", "discrete", "continuum"];

pub fn write_kernel_csv<W: Write>(out: W, rows: &[KernelRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(KERNEL_HEADER)?;
    for r in rows {
        w.write_record([
            format_decimal(r.t),
            format_decimal(r.discrete),
            format_decimal(r.continuum),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_kernel_csv<R: Read>(input: R) -> Result<Vec<KernelRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &KERNEL_HEADER)?;
    Ok(numeric_rows(&mut rdr, 3)?
        .into_iter()
        .map(|r| KernelRow {
            t: r[0],
            discrete: r[1],
            continuum: r[2],
        })
        .collect())
}

// ---- reports ----

/// `metric,value` report; values are free text (numbers, labels, PASS/FAIL).
pub fn write_report_csv<W: Write>(out: W, rows: &[(String, String)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "value"])?;
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report_csv<R: Read>(input: R) -> Result<Vec<(String, String)>> {
    let mut rdr = csv::Reader::from_reader(input);
    check_header(&mut rdr, &["metric", "value"])?;
    rdr.records()
        .map(|rec| {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(bad("report row needs 2 fields"));
            }
            Ok((rec[0].to_string(), rec[1].to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize_ohmic, BathSpec, CouplingBound, Discretization, SystemParams};
    use crate::modes::{build_ground_state, sample_ground_state_seeded};
    use proptest::prelude::*;

    #[test]
    fn decimal_format_examples() {
        assert_eq!(format_decimal(0.0), "0.0");
        assert_eq!(format_decimal(1.0), "1.0000000000000000");
        assert_eq!(format_decimal(1e20), "100000000000000000000.0");
        assert_eq!(format_decimal(0.1), "0.10000000000000001");
        assert_eq!(format_decimal(-123.456), "-123.45600000000000");
        assert_eq!(format_decimal(f64::NAN), "NaN");
    }

    proptest! {
        #[test]
        fn decimal_roundtrip_is_exact(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let s = format_decimal(v);
            prop_assert!(!s.contains('e'));
            let back: f64 = s.parse().unwrap();
            prop_assert_eq!(back.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn bath_roundtrip() {
        let bath = discretize_ohmic(
            &BathSpec::new(7, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_bath_csv(&mut buf, &bath).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("alpha,omega,gamma,gamma_bar,weight\n"));
        let rows = read_bath_csv(&buf[..]).unwrap();
        assert_eq!(rows, bath_rows(&bath));
    }

    #[test]
    fn samples_and_modes_roundtrip() {
        let bath = discretize_ohmic(
            &BathSpec::new(4, 1.5, 1.0, Discretization::PaperEq44)
                .with_coupling_bound(CouplingBound::Unbounded),
        )
        .unwrap();
        let params = SystemParams::new(1.0, 0.1, 0.5, 0.5).unwrap();
        let gs = build_ground_state(&params, &bath).unwrap();
        let samples = sample_ground_state_seeded(&gs, 1, 20).unwrap();
        for momenta in [false, true] {
            let mut buf = Vec::new();
            write_samples_csv(&mut buf, &samples, momenta).unwrap();
            let (back, had) = read_samples_csv(&buf[..]).unwrap();
            assert_eq!(had, momenta);
            for (a, b) in back.iter().zip(&samples) {
                assert_eq!(a.q, b.q);
                assert_eq!(a.x, b.x);
                if momenta {
                    assert_eq!(a.p, b.p);
                    assert_eq!(a.p_bath, b.p_bath);
                }
            }
        }
        let mut buf = Vec::new();
        write_modes_csv(&mut buf, &gs).unwrap();
        let rows = read_modes_csv(&buf[..]).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[2].theta, gs.modes()[2].theta);
        assert_eq!(rows[3].omega_minus, gs.modes()[3].omega_minus);
    }

    #[test]
    fn trajectory_roundtrip() {
        let q: Vec<f64> = (0..50).map(|k| (0.1 * k as f64).sin()).collect();
        let v: Vec<f64> = (0..50).map(|k| (0.1 * k as f64).cos()).collect();
        let tr = Trajectory::new(1e-3, 0.0, q, v, Method::MarkovQuantum).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &tr, Some(42)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text
            .starts_with("# method=markov_quantum dt=0.0010000000000000000 seed=42\nt,q,qdot\n"));
        let (back, meta) = read_trajectory_csv(&buf[..]).unwrap();
        assert_eq!(back, tr);
        assert_eq!(meta.seed, Some(42));

        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &tr, None).unwrap();
        assert_eq!(read_trajectory_csv(&buf[..]).unwrap().1.seed, None);
    }

    #[test]
    fn small_tables_roundtrip() {
        let kernel = vec![
            KernelRow {
                t: 0.0,
                discrete: 1.0,
                continuum: 0.95,
            },
            KernelRow {
                t: 0.5,
                discrete: -0.25,
                continuum: 0.3,
            },
        ];
        let mut buf = Vec::new();
        write_kernel_csv(&mut buf, &kernel).unwrap();
        assert_eq!(read_kernel_csv(&buf[..]).unwrap(), kernel);

        let scan = vec![ForceScanRow {
            q: 0.5,
            classical: 1.0,
            quantum: 2.0,
            force: -3.0,
        }];
        let mut buf = Vec::new();
        write_force_scan_csv(&mut buf, &scan, "ground_state_mean").unwrap();
        let back = read_force_scan_csv(&buf[..]).unwrap();
        assert_eq!(back[0].x_slice_spec, "ground_state_mean");
        assert_eq!(
            (
                back[0].q,
                back[0].potential,
                back[0].quantum_potential,
                back[0].force
            ),
            (0.5, 1.0, 2.0, -3.0)
        );

        let report = vec![
            ("relative_l2".to_string(), format_decimal(1e-4)),
            ("verdict".to_string(), "PASS".to_string()),
        ];
        let mut buf = Vec::new();
        write_report_csv(&mut buf, &report).unwrap();
        assert_eq!(read_report_csv(&buf[..]).unwrap(), report);
    }

    #[test]
    fn wrong_header_is_rejected() {
        let err = read_kernel_csv(&b"t,a,b\n0,1,2\n"[..]).unwrap_err();
        assert!(matches!(err, IoError::Format(_)));
        let err = read_trajectory_csv(&b"t,q,qdot\n0,1,2\n"[..]).unwrap_err();
        assert!(matches!(err, IoError::Format(_)));
    }
}
