//! Small numerical helpers shared by the fitting code.

/// Ordinary least squares `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 0 when `y` has no variance.
    pub r_squared: f64,
}

/// Returns `None` with fewer than two points or when all `x` coincide.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        0.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Geometric grid `start·ratioᵏ` up to and including `end` (with a relative
/// slack of 1e-12 on the last point).
pub fn geometric_grid(start: f64, end: f64, ratio: f64) -> Vec<f64> {
    assert!(start > 0.0 && ratio > 1.0);
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let v = start * ratio.powi(k);
        if v > end * (1.0 + 1e-12) {
            break;
        }
        out.push(v);
        k += 1;
    }
    out
}

/// Arithmetic grid `start + k·step` up to and including `end`.
pub fn linear_grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0);
    let n = ((end - start) / step + 1e-9).floor() as i64;
    (0..=n).map(|k| start + k as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x - 1.0).collect();
        let f = least_squares(&xs, &ys).unwrap();
        assert_relative_eq!(f.slope, 2.0);
        assert_relative_eq!(f.intercept, -1.0);
        assert_relative_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn flat_data_has_zero_r2() {
        let f = least_squares(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.r_squared, 0.0);
        assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }

    #[test]
    fn grids() {
        assert_eq!(linear_grid(6.0, 13.0, 0.5).len(), 15);
        let g = geometric_grid(20.0, 200.0, 1.25);
        assert_eq!(g[0], 20.0);
        assert!(*g.last().unwrap() <= 200.0);
        assert_eq!(g.len(), 11);
    }
}
