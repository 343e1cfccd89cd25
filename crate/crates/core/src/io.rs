//! CSV output. Floats are written with 17 significant digits (`{:.16e}`)
//! so values round-trip exactly.

use std::io::Write;

use crate::couplings::{MeasureCoupling, PdBridgeDraw, ScalarCoupling};
use crate::excursions::ExcursionCoupling;
use crate::measures::{JumpMeasure, RankedWeights};
use crate::stats::StatReport;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn join_f64(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",")
}

/// One row per jump, fixed atoms last (`kind = atom`).
pub fn write_jump_measure<W: Write>(w: &mut W, m: &JumpMeasure, seed: u64) -> std::io::Result<()> {
    writeln!(w, "index,kind,size,atom,total_mass,tail_bound,seed")?;
    let rows = m
        .jumps
        .iter()
        .map(|j| ("jump", j))
        .chain(m.fixed_atoms.iter().map(|j| ("atom", j)));
    for (i, (kind, j)) in rows.enumerate() {
        writeln!(
            w,
            "{i},{kind},{},{},{},{},{seed}",
            fmt_f64(j.size),
            fmt_f64(j.atom),
            fmt_f64(m.total_mass),
            fmt_f64(m.tail_bound)
        )?;
    }
    Ok(())
}

/// One row per weight.
pub fn write_weights<W: Write>(w: &mut W, p: &RankedWeights, seed: u64) -> std::io::Result<()> {
    writeln!(w, "rank,p,deficit,seed")?;
    for (i, v) in p.p.iter().enumerate() {
        writeln!(w, "{},{},{},{seed}", i + 1, fmt_f64(*v), fmt_f64(p.deficit))?;
    }
    Ok(())
}

pub const SCALAR_HEADER: &str = "xi,T,xiT,seed";

pub fn scalar_row(c: &ScalarCoupling, seed: u64) -> String {
    format!("{},{seed}", join_f64(&[c.xi, c.t, c.xi_t()]))
}

pub const MEASURE_HEADER: &str = "xi,T,xiT,p1,half_mass,deficit,jumps,seed";

pub fn measure_row(c: &MeasureCoupling, seed: u64) -> String {
    format!(
        "{},{},{},{seed}",
        join_f64(&[c.xi, c.t, c.xi_t(), c.weights.p1(), c.half_mass()]),
        fmt_f64(c.weights.deficit),
        c.measure.jumps.len() + c.measure.fixed_atoms.len()
    )
}

/// Header `xi_H,H,T,p1..pk` for the first `k` ranked weights.
pub fn pd_bridge_header(k: usize) -> String {
    let mut h = String::from("xi_H,H,T");
    for i in 1..=k {
        h.push_str(&format!(",p{i}"));
    }
    h
}

/// Missing weights (fewer than `k` atoms) are written as 0.
pub fn pd_bridge_row(d: &PdBridgeDraw, k: usize) -> String {
    let mut v = vec![d.xi_h, d.h, d.t];
    v.extend((0..k).map(|i| d.weights.p.get(i).copied().unwrap_or(0.0)));
    join_f64(&v)
}

pub const EXCURSION_HEADER: &str = "xi,O,U,Delta,xiDelta,case_tag,alpha,nu,b,seed";

pub fn excursion_row(c: &ExcursionCoupling, seed: u64) -> String {
    let e = &c.triple;
    format!(
        "{},{},{},{seed}",
        join_f64(&[c.xi, e.overshoot, e.undershoot, e.duration, c.xi_delta()]),
        c.model.case.label(),
        join_f64(&[c.model.alpha, c.model.nu, c.model.b])
    )
}

pub fn write_reports<W: Write>(w: &mut W, reports: &[StatReport]) -> std::io::Result<()> {
    writeln!(w, "{}", StatReport::CSV_HEADER)?;
    for r in reports {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Jump;

    #[test]
    fn floats_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, 0.7255064567323456] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn measure_csv_layout() {
        let m = JumpMeasure {
            jumps: vec![Jump { size: 2.0, atom: 0.25 }],
            fixed_atoms: vec![Jump { size: 1.0, atom: 0.5 }],
            total_mass: 3.0,
            tail_bound: 0.0,
        };
        let mut out = Vec::new();
        write_jump_measure(&mut out, &m, 9).unwrap();
        let s = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1,atom,1.0000000000000000e0,"));
        assert!(lines[2].ends_with(",9"));
        assert_eq!(pd_bridge_header(2), "xi_H,H,T,p1,p2");
    }
}
