use crate::error::{Error, Result};
use crate::loads::NodalField;

/// Nodal error norms. `l2` is the root mean square over nodes of the
/// error vector length; relative values divide by the largest exact value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorMetrics {
    pub max_abs: f64,
    pub rel_max: f64,
    pub l2: f64,
    pub vert_max_abs: f64,
    pub vert_rel_max: f64,
    pub vert_l2: f64,
}

pub fn error_metrics(u: &NodalField, exact: &NodalField, dim: usize, vertical: Option<usize>) -> Result<ErrorMetrics> {
    if u.len() != exact.len() || u.len() % dim != 0 {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            got: u.len(),
        });
    }
    let n = u.len() / dim;
    let mut m = ErrorMetrics::default();
    let (mut ref_all, mut ref_v) = (0.0f64, 0.0f64);
    let (mut sum, mut sum_v) = (0.0, 0.0);
    for node in 0..n {
        let mut e2 = 0.0;
        let mut x2 = 0.0;
        for k in 0..dim {
            let e = u[node * dim + k] - exact[node * dim + k];
            e2 += e * e;
            x2 += exact[node * dim + k].powi(2);
        }
        m.max_abs = m.max_abs.max(e2.sqrt());
        ref_all = ref_all.max(x2.sqrt());
        sum += e2;
        if let Some(a) = vertical {
            let e = (u[node * dim + a] - exact[node * dim + a]).abs();
            m.vert_max_abs = m.vert_max_abs.max(e);
            ref_v = ref_v.max(exact[node * dim + a].abs());
            sum_v += e * e;
        }
    }
    m.l2 = (sum / n.max(1) as f64).sqrt();
    m.rel_max = if ref_all > 0.0 { m.max_abs / ref_all } else { m.max_abs };
    if vertical.is_some() {
        m.vert_l2 = (sum_v / n.max(1) as f64).sqrt();
        m.vert_rel_max = if ref_v > 0.0 { m.vert_max_abs / ref_v } else { m.vert_max_abs };
    }
    Ok(m)
}

/// Least-squares slope of `log y` against `log x` over the finite, positive
/// pairs; `NaN` with fewer than two.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        f64::NAN
    } else {
        sxy / sxx
    }
}
