//! Long-format study CSV: one row per sweep point and eigenvalue index.

use std::fmt::Write;

use quadcurl::{Error, Result};

pub const STUDY_HEADER: &str = "param,h,p,n_V,n_U,k,lambda,relerr,rate";

/// Which parameter the study sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    H,
    P,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::H => "h",
            SweepParam::P => "p",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub param: SweepParam,
    /// Grid spacing.
    pub h: f64,
    pub p: usize,
    pub n_v: usize,
    pub n_u: usize,
    /// 1-based eigenvalue index.
    pub k: usize,
    pub lambda: f64,
    /// `|lambda - ref| / ref`, if a reference is known.
    pub relerr: Option<f64>,
    /// Rate against the previous sweep point.
    pub rate: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn write_study_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from(STUDY_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{:e},{},{},{},{},{:e},{},{}",
            r.param.name(),
            r.h,
            r.p,
            r.n_v,
            r.n_u,
            r.k,
            r.lambda,
            opt(r.relerr),
            opt(r.rate)
        )
        .unwrap();
    }
    out
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Parse a study CSV. Errors carry the 1-based line number.
pub fn read_study_csv(src: &str) -> Result<Vec<StudyRow>> {
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    match lines.next() {
        Some((_, h)) if h == STUDY_HEADER => {}
        Some((n, h)) => return Err(err(n, format!("expected header `{STUDY_HEADER}`, found `{h}`"))),
        None => return Err(err(1, "empty file")),
    }
    let mut rows = Vec::new();
    for (n, line) in lines {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(err(n, format!("expected 9 fields, found {}", f.len())));
        }
        let param = match f[0] {
            "h" => SweepParam::H,
            "p" => SweepParam::P,
            other => return Err(err(n, format!("unknown sweep parameter `{other}`"))),
        };
        let float = |i: usize, name: &str| -> Result<f64> {
            let v: f64 = f[i].parse().map_err(|_| err(n, format!("bad {name} `{}`", f[i])))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(err(n, format!("non-finite {name}")))
            }
        };
        let int = |i: usize, name: &str| -> Result<usize> { f[i].parse().map_err(|_| err(n, format!("bad {name} `{}`", f[i]))) };
        let optional = |i: usize, name: &str| -> Result<Option<f64>> { if f[i].is_empty() { Ok(None) } else { float(i, name).map(Some) } };
        let row = StudyRow {
            param,
            h: float(1, "h")?,
            p: int(2, "p")?,
            n_v: int(3, "n_V")?,
            n_u: int(4, "n_U")?,
            k: int(5, "k")?,
            lambda: float(6, "lambda")?,
            relerr: optional(7, "relerr")?,
            rate: optional(8, "rate")?,
        };
        if row.h <= 0.0 {
            return Err(err(n, "h must be positive"));
        }
        if row.k == 0 {
            return Err(err(n, "k is 1-based"));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: usize, lambda: f64, relerr: Option<f64>) -> StudyRow {
        StudyRow { param: SweepParam::H, h: 0.125, p: 2, n_v: 1536, n_u: 289, k, lambda, relerr, rate: None }
    }

    #[test]
    fn round_trip() {
        let rows = vec![row(1, 697.664507, Some(1.46e-2)), row(2, 1.0 / 3.0, None)];
        let text = write_study_csv(&rows);
        assert_eq!(read_study_csv(&text).unwrap(), rows);
    }

    #[test]
    fn header_only() {
        assert!(read_study_csv(&write_study_csv(&[])).unwrap().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = format!("{STUDY_HEADER}\nh,0.125,2,10,3,1,700,,\nh,0.125,2,10,3,2,oops,,\n");
        match read_study_csv(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match read_study_csv("param,h\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match read_study_csv(&format!("{STUDY_HEADER}\nh,1,2,3\n")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
