//! Plain-text matrix and state files.
//!
//! ```text
//! dim 2
//! 0,0 1,0
//! 1,0 0,0
//! ```
//!
//! Each token is `re,im`; matrix rows are row-major, state files carry one
//! amplitude per line. Blank lines and `#` comments are skipped.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{nearest_unitary, qubits_for_dim, unitarity_residual, CMat, StateVector, UnitaryMatrix};

/// Tolerance for accepting user-supplied matrices and states, which usually
/// come with a few printed digits. Accepted inputs are projected back to
/// exact unitarity or unit norm.
pub const LOAD_TOL: f64 = 1e-6;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_complex(tok: &str, line: usize) -> Result<C64> {
    let (re, im) = tok
        .split_once(',')
        .ok_or_else(|| parse_err(line, format!("expected re,im, got `{tok}`")))?;
    let re: f64 = re
        .parse()
        .map_err(|_| parse_err(line, format!("bad real part `{re}`")))?;
    let im: f64 = im
        .parse()
        .map_err(|_| parse_err(line, format!("bad imaginary part `{im}`")))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(parse_err(line, format!("non-finite entry `{tok}`")));
    }
    Ok(C64::new(re, im))
}

/// Reads the header and the remaining lines as rows of `cols` entries each.
fn parse_rows(text: &str, cols: impl Fn(usize) -> usize) -> Result<(usize, Vec<C64>)> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(0, "empty file"))?;
    let d = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["dim", d] => d
            .parse::<usize>()
            .map_err(|_| parse_err(hline, format!("bad dimension `{d}`")))?,
        _ => return Err(parse_err(hline, "expected `dim <d>`")),
    };
    qubits_for_dim(d).map_err(|_| parse_err(hline, format!("dimension {d} is not a power of two")))?;
    let width = cols(d);
    let mut entries = Vec::with_capacity(d * width);
    let mut rows = 0;
    let mut last = hline;
    for (ln, l) in lines {
        last = ln;
        if rows == d {
            return Err(parse_err(ln, format!("more than {d} rows")));
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != width {
            return Err(parse_err(ln, format!("expected {width} entries, found {}", toks.len())));
        }
        for t in toks {
            entries.push(parse_complex(t, ln)?);
        }
        rows += 1;
    }
    if rows < d {
        return Err(parse_err(last, format!("expected {d} rows, found {rows}")));
    }
    Ok((d, entries))
}

/// Parses a matrix file and returns the nearest exact unitary.
pub fn parse_matrix(text: &str) -> Result<UnitaryMatrix> {
    let (d, entries) = parse_rows(text, |d| d)?;
    let m = CMat::from_row_slice(d, d, &entries);
    let residual = unitarity_residual(&m);
    if residual > LOAD_TOL {
        return Err(Error::NotUnitary { residual });
    }
    UnitaryMatrix::new(nearest_unitary(&m))
}

/// Parses a state file and renormalizes it.
pub fn parse_state(text: &str) -> Result<StateVector> {
    let (_, amps) = parse_rows(text, |_| 1)?;
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > LOAD_TOL {
        return Err(Error::NotNormalized { norm });
    }
    StateVector::new(amps.into_iter().map(|z| z / norm).collect())
}

fn push_complex(out: &mut String, z: C64) {
    let _ = write!(out, "{},{}", z.re, z.im);
}

pub fn emit_matrix(u: &CMat) -> String {
    let mut out = format!("dim {}\n", u.nrows());
    for r in 0..u.nrows() {
        for c in 0..u.ncols() {
            if c > 0 {
                out.push(' ');
            }
            push_complex(&mut out, u[(r, c)]);
        }
        out.push('\n');
    }
    out
}

pub fn emit_state(psi: &StateVector) -> String {
    let mut out = format!("dim {}\n", psi.amplitudes().len());
    for z in psi.amplitudes().iter() {
        push_complex(&mut out, *z);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{check_unitary, max_diff, random_state, random_unitary};

    #[test]
    fn matrix_round_trip_is_exact() {
        let u = random_unitary(3, 5);
        let back = parse_matrix(&emit_matrix(&u)).unwrap();
        assert!(max_diff(&back, &u) < 1e-14);
    }

    #[test]
    fn state_round_trip() {
        let psi = random_state(4, 2);
        let back = parse_state(&emit_state(&psi)).unwrap();
        assert!((back.fidelity(&psi) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn low_precision_input_is_projected() {
        let text = "dim 2\n# hadamard\n0.707107,0 0.707107,0\n0.707107,0 -0.707107,0\n";
        let u = parse_matrix(text).unwrap();
        assert!(check_unitary(&u, 1e-12).unwrap());
        let text = "dim 2\n0.7071,0\n0.7071,0\n";
        assert!(matches!(parse_state(text), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn diagnostics_carry_lines() {
        let cases = [
            ("", 0),
            ("dim 3\n", 1),
            ("size 2\n", 1),
            ("dim 2\n1,0 0,0\n0,0\n", 3),
            ("dim 2\n1,0 0;0\n0,0 1,0\n", 2),
            ("dim 2\n1,0 0,0\n", 2),
            ("dim 2\n1,0 0,0\n0,0 1,0\n1,0 1,0\n", 4),
            ("dim 2\n1,0 nan,0\n0,0 1,0\n", 2),
        ];
        for (text, want) in cases {
            match parse_matrix(text) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(matches!(
            parse_matrix("dim 2\n1,0 1,0\n0,0 1,0\n"),
            Err(Error::NotUnitary { .. })
        ));
    }
}
