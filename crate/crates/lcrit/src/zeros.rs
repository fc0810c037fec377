//! Critical-line zeros of Lambda(s, chi): location by sign changes of the
//! rotated real function Z(t) = kappa^{-1/2} Lambda(1/2 + it, chi),
//! completeness certification by the argument principle, and a plain-text
//! zero-file format for persistence.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::character::PrimitiveCharacter;
use crate::error::{Error, Result};
use crate::lfunc::eval_completed;

/// Relative tolerance for the imaginary residue of Z.
const Z_IM_TOL: f64 = 1e-8;

/// Scan step default; the smallest zero gaps at desk heights are far wider.
pub const DEFAULT_SCAN_STEP: f64 = 0.05;

/// |Z'(gamma)| below this flags a suspected higher-order zero for review.
const MULTIPLICITY_FLAG_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct RotatedValue {
    pub t: f64,
    /// Re of kappa^{-1/2} Lambda(1/2 + it); the real value of Z.
    pub value: f64,
    /// Recorded imaginary residue (health indicator, should be ~0).
    pub im_residue: f64,
}

/// Z(t) = kappa^{-1/2} Lambda(1/2 + it, chi), real up to numerical residue.
/// Sign changes of Z along t are critical-line zeros of odd multiplicity.
pub fn rotated_z(t: f64, chi: &PrimitiveCharacter) -> Result<RotatedValue> {
    let lam = eval_completed(Complex64::new(0.5, t), chi)?;
    let z = chi.rotation() * lam;
    if z.im.abs() > Z_IM_TOL * (1.0 + z.norm()) {
        return Err(Error::NumericHealth {
            module: "zeros",
            residue: z.im.abs(),
            tolerance: Z_IM_TOL * (1.0 + z.norm()),
        });
    }
    Ok(RotatedValue {
        t,
        value: z.re,
        im_residue: z.im,
    })
}

fn z_value(t: f64, chi: &PrimitiveCharacter) -> Result<f64> {
    Ok(rotated_z(t, chi)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroSource {
    Computed,
    Imported,
}

/// Ordinates of the critical-line zeros of Lambda(s, chi) with |gamma| <= height.
/// Both signs are stored explicitly; for complex chi the list is not
/// symmetric about zero.
#[derive(Debug, Clone)]
pub struct ZeroList {
    pub q: u32,
    pub index: u32,
    /// Strictly increasing ordinates.
    pub ordinates: Vec<f64>,
    /// All zeros with |gamma| <= height are present (certified when computed).
    pub height: f64,
    /// Worst per-zero ordinate accuracy.
    pub accuracy: f64,
    pub per_zero_accuracy: Vec<f64>,
    pub source: ZeroSource,
    /// Indices whose |Z'(gamma)| is suspiciously small; flagged, not resolved.
    pub suspected_multiple: Vec<usize>,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// The sublist with |gamma| <= h (h <= self.height keeps certification).
    pub fn restrict(&self, h: f64) -> ZeroList {
        let keep: Vec<usize> = (0..self.ordinates.len())
            .filter(|&i| self.ordinates[i].abs() <= h)
            .collect();
        ZeroList {
            q: self.q,
            index: self.index,
            ordinates: keep.iter().map(|&i| self.ordinates[i]).collect(),
            height: h.min(self.height),
            accuracy: self.accuracy,
            per_zero_accuracy: keep.iter().map(|&i| self.per_zero_accuracy[i]).collect(),
            source: self.source,
            suspected_multiple: Vec::new(),
        }
    }

    pub fn ensure_matches(&self, chi: &PrimitiveCharacter) -> Result<()> {
        if self.q != chi.modulus() || self.index != chi.index() {
            return Err(Error::CharacterMismatch {
                file_q: self.q,
                file_index: self.index,
                q: chi.modulus(),
                index: chi.index(),
            });
        }
        Ok(())
    }
}

/// Count zeros of Lambda(s, chi) with ordinate in (t_lo, t_hi) by the total
/// winding of Lambda around the rectangle [-1/2, 3/2] x [t_lo, t_hi].
///
/// The phase is tracked by adaptive sampling: any step turning the value by
/// more than pi/2 is bisected, so no winding can slip between samples.
pub fn argument_principle_count(chi: &PrimitiveCharacter, t_lo: f64, t_hi: f64) -> Result<i64> {
    let corners = [
        Complex64::new(-0.5, t_lo),
        Complex64::new(1.5, t_lo),
        Complex64::new(1.5, t_hi),
        Complex64::new(-0.5, t_hi),
        Complex64::new(-0.5, t_lo),
    ];
    let mut total = 0.0;
    for w in corners.windows(2) {
        total += winding_along(chi, w[0], w[1])?;
    }
    let n = total / (2.0 * PI);
    let rounded = n.round();
    if (n - rounded).abs() > 0.01 {
        return Err(Error::NumericHealth {
            module: "zeros",
            residue: (n - rounded).abs(),
            tolerance: 0.01,
        });
    }
    Ok(rounded as i64)
}

fn winding_along(chi: &PrimitiveCharacter, a: Complex64, b: Complex64) -> Result<f64> {
    // Initial subdivision at scale 0.25 so the adaptive recursion starts from
    // a sampling the phase cannot outrun at desk heights.
    let len = (b - a).norm();
    let n = (len / 0.25).ceil().max(1.0) as usize;
    let mut acc = 0.0;
    let mut prev_pt = a;
    let mut prev_val = eval_completed(a, chi)?;
    for i in 1..=n {
        let pt = a + (b - a) * (i as f64 / n as f64);
        let val = eval_completed(pt, chi)?;
        acc += winding_step(chi, prev_pt, prev_val, pt, val, 40)?;
        prev_pt = pt;
        prev_val = val;
    }
    Ok(acc)
}

fn winding_step(
    chi: &PrimitiveCharacter,
    a: Complex64,
    va: Complex64,
    b: Complex64,
    vb: Complex64,
    depth: u32,
) -> Result<f64> {
    if va.norm() == 0.0 || vb.norm() == 0.0 {
        return Err(Error::NumericHealth {
            module: "zeros",
            residue: 0.0,
            tolerance: 0.0,
        });
    }
    let dphi = (vb / va).arg();
    let ratio = vb.norm() / va.norm();
    if dphi.abs() <= 0.5 * PI && ratio < 8.0 && ratio > 0.125 {
        return Ok(dphi);
    }
    if depth == 0 {
        return Ok(dphi);
    }
    let m = (a + b) * 0.5;
    let vm = eval_completed(m, chi)?;
    Ok(winding_step(chi, a, va, m, vm, depth - 1)? + winding_step(chi, m, vm, b, vb, depth - 1)?)
}

/// Bisection + secant refinement of a bracketed sign change of Z.
fn refine_zero(
    chi: &PrimitiveCharacter,
    mut a: f64,
    mut za: f64,
    mut b: f64,
    mut zb: f64,
) -> Result<(f64, f64)> {
    debug_assert!(za * zb < 0.0);
    for _ in 0..40 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let zm = z_value(m, chi)?;
        if zm == 0.0 {
            return Ok((m, f64::EPSILON * m.abs().max(1.0)));
        }
        if za * zm < 0.0 {
            b = m;
            zb = zm;
        } else {
            a = m;
            za = zm;
        }
        if b - a < 1e-11 {
            break;
        }
    }
    // One secant polish inside the bracket.
    let sec = a - za * (b - a) / (zb - za);
    let gamma = if sec > a && sec < b { sec } else { 0.5 * (a + b) };
    Ok((gamma, (b - a).max(f64::EPSILON * gamma.abs())))
}

/// Collect brackets of sign changes on [lo, hi], recursively subdividing
/// cells whose |Z| dips suspiciously without changing sign (close pairs).
fn collect_brackets(
    chi: &PrimitiveCharacter,
    lo: f64,
    zlo: f64,
    hi: f64,
    zhi: f64,
    depth: u32,
    out: &mut Vec<(f64, f64, f64, f64)>,
) -> Result<()> {
    if zlo * zhi < 0.0 {
        out.push((lo, zlo, hi, zhi));
        return Ok(());
    }
    if depth == 0 {
        return Ok(());
    }
    // A deep dip in |Z| between same-sign endpoints may hide a close pair.
    let m = 0.5 * (lo + hi);
    let zm = z_value(m, chi)?;
    if zm * zlo < 0.0 || zm.abs() < 0.25 * zlo.abs().min(zhi.abs()) {
        collect_brackets(chi, lo, zlo, m, zm, depth - 1, out)?;
        collect_brackets(chi, m, zm, hi, zhi, depth - 1, out)?;
    }
    Ok(())
}

/// Locate all zeros with |gamma| <= height. Completeness is certified by the
/// argument principle; on a count mismatch the scan retries with a halved
/// step, and after the final retry reports the interval where the counts
/// disagree.
pub fn find_zeros(chi: &PrimitiveCharacter, height: f64, step: f64) -> Result<ZeroList> {
    if height <= 0.0 || step <= 0.0 {
        return Err(Error::Domain {
            module: "zeros",
            message: format!("height {height} and step {step} must be positive"),
        });
    }
    let mut step = step;
    let mut last_found: Vec<f64> = Vec::new();
    let mut expected = 0i64;
    for _attempt in 0..4 {
        let (ordinates, accuracies) = scan_zeros(chi, height, step)?;
        // Contour endpoints slightly beyond the height, placed where |Z| is
        // locally largest; an odd crossing between height and the contour
        // shows up as a sign difference and adjusts the expected count.
        let (hi_pad, hi_extra) = contour_pad(chi, height, step, 1.0)?;
        let (lo_pad, lo_extra) = contour_pad(chi, height, step, -1.0)?;
        let ap = argument_principle_count(chi, lo_pad, hi_pad)?;
        expected = ap - hi_extra - lo_extra;
        if expected == ordinates.len() as i64 {
            let suspected = flag_multiplicity(chi, &ordinates)?;
            let accuracy = accuracies.iter().cloned().fold(0.0f64, f64::max);
            return Ok(ZeroList {
                q: chi.modulus(),
                index: chi.index(),
                ordinates,
                height,
                accuracy,
                per_zero_accuracy: accuracies,
                source: ZeroSource::Computed,
                suspected_multiple: suspected,
            });
        }
        last_found = ordinates;
        step *= 0.5;
    }
    // Localize the disagreement for the error report.
    let (gap_lo, gap_hi) = localize_gap(chi, -height, height, &last_found)?;
    Err(Error::IncompleteZeroList {
        expected,
        found: last_found.len() as i64,
        gap_lo,
        gap_hi,
    })
}

fn scan_zeros(chi: &PrimitiveCharacter, height: f64, step: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = (2.0 * height / step).ceil() as usize;
    let ts: Vec<f64> = (0..=n)
        .map(|i| -height + 2.0 * height * i as f64 / n as f64)
        .collect();
    let zs: Vec<Result<f64>> = ts.par_iter().map(|&t| z_value(t, chi)).collect();
    let mut z = Vec::with_capacity(zs.len());
    for r in zs {
        z.push(r?);
    }
    let mut brackets = Vec::new();
    for i in 0..n {
        collect_brackets(chi, ts[i], z[i], ts[i + 1], z[i + 1], 3, &mut brackets)?;
    }
    let refined: Vec<Result<(f64, f64)>> = brackets
        .par_iter()
        .map(|&(a, za, b, zb)| refine_zero(chi, a, za, b, zb))
        .collect();
    let mut ordinates = Vec::new();
    let mut accuracies = Vec::new();
    for r in refined {
        let (g, acc) = r?;
        if g.abs() <= height {
            ordinates.push(g);
            accuracies.push(acc);
        }
    }
    let mut idx: Vec<usize> = (0..ordinates.len()).collect();
    idx.sort_by(|&i, &j| ordinates[i].partial_cmp(&ordinates[j]).expect("finite"));
    Ok((
        idx.iter().map(|&i| ordinates[i]).collect(),
        idx.iter().map(|&i| accuracies[i]).collect(),
    ))
}

/// Pick the contour ordinate just beyond `height` (sign gives the side) where
/// |Z| is largest among a few candidates; returns (ordinate, odd-crossing
/// adjustment between the height and the contour line).
fn contour_pad(chi: &PrimitiveCharacter, height: f64, step: f64, side: f64) -> Result<(f64, i64)> {
    let edge = side * height;
    let z_at = z_value(edge, chi)?;
    let mut best = (edge + side * 0.2 * step, f64::MIN);
    for k in 1..=5 {
        let t = edge + side * step * k as f64 / 5.0;
        let z = z_value(t, chi)?;
        if z.abs() > best.1 {
            best = (t, z.abs());
        }
    }
    let z_pad = z_value(best.0, chi)?;
    let extra = if z_at * z_pad < 0.0 { 1 } else { 0 };
    Ok((best.0, extra))
}

fn flag_multiplicity(chi: &PrimitiveCharacter, ordinates: &[f64]) -> Result<Vec<usize>> {
    let mut flagged = Vec::new();
    for (i, &g) in ordinates.iter().enumerate() {
        let h = 1e-4;
        let dz = (z_value(g + h, chi)? - z_value(g - h, chi)?) / (2.0 * h);
        if dz.abs() < MULTIPLICITY_FLAG_TOL {
            flagged.push(i);
        }
    }
    Ok(flagged)
}

/// Bisect down to the subinterval where the argument count and the located
/// zeros disagree.
fn localize_gap(chi: &PrimitiveCharacter, lo: f64, hi: f64, found: &[f64]) -> Result<(f64, f64)> {
    let mut lo = lo;
    let mut hi = hi;
    for _ in 0..12 {
        if hi - lo < 0.5 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        // Nudge the split off any located zero.
        let mid = if found.iter().any(|g| (g - mid).abs() < 1e-3) {
            mid + 7e-3
        } else {
            mid
        };
        let in_left = found.iter().filter(|&&g| g > lo && g < mid).count() as i64;
        let ap_left = argument_principle_count(chi, lo, mid)?;
        if ap_left != in_left {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}

/// Write the zero-file format: `# modulus:`, `# character:`, `# height:`,
/// `# accuracy:` headers, then one ordinate per line, strictly increasing.
pub fn export_zeros<P: AsRef<Path>>(list: &ZeroList, path: P) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "# modulus: {}", list.q)?;
    writeln!(f, "# character: {}", list.index)?;
    writeln!(f, "# height: {}", list.height)?;
    writeln!(f, "# accuracy: {:e}", list.accuracy)?;
    for g in &list.ordinates {
        writeln!(f, "{g}")?;
    }
    Ok(())
}

/// Parse a zero file; errors carry 1-based line numbers.
pub fn import_zeros<P: AsRef<Path>>(path: P) -> Result<ZeroList> {
    let f = std::fs::File::open(path)?;
    let reader = BufReader::new(f);
    let mut q = None;
    let mut index = None;
    let mut height = None;
    let mut accuracy = None;
    let mut ordinates: Vec<f64> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let (key, value) = rest.split_once(':').ok_or(Error::ZeroFileParse {
                line: line_no,
                message: format!("malformed header {rest:?}"),
            })?;
            let value = value.trim();
            match key.trim() {
                "modulus" => q = Some(parse_header_u32(value, "modulus", line_no)?),
                "character" => index = Some(parse_header_u32(value, "character", line_no)?),
                "height" => {
                    height = Some(value.parse::<f64>().map_err(|_| Error::ZeroFileParse {
                        line: line_no,
                        message: format!("bad height {value:?}"),
                    })?)
                }
                "accuracy" => {
                    accuracy = Some(value.parse::<f64>().map_err(|_| Error::ZeroFileParse {
                        line: line_no,
                        message: format!("bad accuracy {value:?}"),
                    })?)
                }
                other => {
                    return Err(Error::ZeroFileParse {
                        line: line_no,
                        message: format!("unknown header key {other:?}"),
                    })
                }
            }
            continue;
        }
        let g: f64 = line.parse().map_err(|_| Error::ZeroFileParse {
            line: line_no,
            message: format!("bad ordinate {line:?}"),
        })?;
        if let Some(&last) = ordinates.last() {
            if g <= last {
                return Err(Error::ZeroFileParse {
                    line: line_no,
                    message: format!("ordinates not strictly increasing: {g} after {last}"),
                });
            }
        }
        ordinates.push(g);
    }
    let q = q.ok_or(Error::ZeroFileParse {
        line: 0,
        message: "missing '# modulus:' header".into(),
    })?;
    let index = index.ok_or(Error::ZeroFileParse {
        line: 0,
        message: "missing '# character:' header".into(),
    })?;
    let height = height.ok_or(Error::ZeroFileParse {
        line: 0,
        message: "missing '# height:' header".into(),
    })?;
    let accuracy = accuracy.ok_or(Error::ZeroFileParse {
        line: 0,
        message: "missing '# accuracy:' header".into(),
    })?;
    let n = ordinates.len();
    Ok(ZeroList {
        q,
        index,
        ordinates,
        height,
        accuracy,
        per_zero_accuracy: vec![accuracy; n],
        source: ZeroSource::Imported,
        suspected_multiple: Vec::new(),
    })
}

fn parse_header_u32(value: &str, what: &str, line: usize) -> Result<u32> {
    value.parse::<u32>().map_err(|_| Error::ZeroFileParse {
        line,
        message: format!("bad {what} {value:?}"),
    })
}
