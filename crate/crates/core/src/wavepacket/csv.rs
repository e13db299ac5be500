//! `t,re,im` CSV exchange of sampled modes.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::{ModeFunction, TimeGrid};
use crate::error::{Error, Result};
use crate::numeric::fmt_f64;

pub const MODE_CSV_HEADER: &str = "t,re,im";

/// Writes one row per grid point. Analytic modes are sampled on `grid`;
/// sampled modes use their own grid when `grid` is `None`.
pub fn write_mode_csv<W: Write>(mode: &ModeFunction, grid: Option<&TimeGrid>, mut out: W) -> Result<()> {
    let grid = match (grid, mode.grid()) {
        (Some(g), _) => *g,
        (None, Some(g)) => *g,
        (None, None) => TimeGrid::canonical(),
    };
    writeln!(out, "{MODE_CSV_HEADER}")?;
    for (t, z) in grid.points().zip(mode.sample(&grid)) {
        writeln!(out, "{},{},{}", fmt_f64(t), fmt_f64(z.re), fmt_f64(z.im))?;
    }
    Ok(())
}

/// Reads a mode written by [`write_mode_csv`] (or by hand). Times must be
/// uniformly spaced; the samples are renormalized to unit norm.
pub fn read_mode_csv<R: BufRead>(input: R) -> Result<ModeFunction> {
    let mut lines = input.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Err(Error::Csv { line: 1, reason: "empty file".into() }),
        }
    };
    if header.trim() != MODE_CSV_HEADER {
        return Err(Error::Csv {
            line: 1,
            reason: format!("expected header `{MODE_CSV_HEADER}`, found `{}`", header.trim()),
        });
    }
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(Error::Csv {
                line: idx + 1,
                reason: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Csv {
                line: idx + 1,
                reason: format!("`{s}`: {e}"),
            })
        };
        times.push(parse(fields[0])?);
        samples.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
    }
    if times.len() < 2 {
        return Err(Error::Csv {
            line: times.len() + 1,
            reason: "need at least two samples".into(),
        });
    }
    let grid = TimeGrid::new(times[0], times[times.len() - 1], times.len())?;
    let h = grid.spacing();
    for (i, &t) in times.iter().enumerate() {
        if (t - grid.point(i)).abs() > 1e-9 * h.max(1.0) {
            return Err(Error::Csv {
                line: i + 2,
                reason: format!("time {t} breaks uniform spacing {h}"),
            });
        }
    }
    ModeFunction::from_samples(grid, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::make_gaussian_mode;

    #[test]
    fn csv_round_trip_is_exact() {
        let grid = TimeGrid::new(-8.0, 8.0, 512).unwrap();
        let mode = make_gaussian_mode(0.25, 3.0, Some(&grid)).unwrap();
        let mut buf = Vec::new();
        write_mode_csv(&mode, None, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,re,im\n"));
        let back = read_mode_csv(buf.as_slice()).unwrap();
        for (a, b) in back.sample(&grid).iter().zip(mode.sample(&grid)) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_header_and_uneven_spacing() {
        assert!(matches!(read_mode_csv("x,y\n1,2\n".as_bytes()), Err(Error::Csv { line: 1, .. })));
        let uneven = "t,re,im\n0,0,0\n1,1,0\n3,0,0\n";
        assert!(matches!(read_mode_csv(uneven.as_bytes()), Err(Error::Csv { .. })));
        let short = "t,re,im\n0,1\n";
        assert!(matches!(read_mode_csv(short.as_bytes()), Err(Error::Csv { line: 2, .. })));
    }
}
