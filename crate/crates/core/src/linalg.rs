//! Small dense solves for the normal equations of the kernel optimizer.

/// Relative pivot magnitude below which a system is treated as singular.
pub const PIVOT_EPS: f64 = 1e-12;

/// Solves `m · x = b` in place by Gaussian elimination with partial pivoting.
///
/// `m` is row-major `n × n`. Returns `None` when a pivot falls below
/// `PIVOT_EPS` times the largest entry of `m`.
pub fn solve_in_place(m: &mut [f64], b: &mut [f64]) -> Option<()> {
    let n = b.len();
    debug_assert_eq!(m.len(), n * n);
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let tiny = PIVOT_EPS * scale;

    for col in 0..n {
        let (pivot_row, pivot) =
            (col..n)
                .map(|r| (r, m[r * n + col].abs()))
                .fold(
                    (col, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot <= tiny {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                m.swap(col * n + c, pivot_row * n + c);
            }
            b.swap(col, pivot_row);
        }
        let diag = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / diag;
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[r * n + c] -= f * m[col * n + c];
            }
            b[r] -= f * b[col];
        }
    }

    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= m[row * n + c] * b[c];
        }
        b[row] = acc / m[row * n + row];
    }
    Some(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_with_row_swap() {
        let mut m = vec![0.0, 2.0, 1.0, 1.0];
        let mut b = vec![4.0, 3.0];
        solve_in_place(&mut m, &mut b).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-15);
        assert!((b[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_rejected() {
        let mut m = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(solve_in_place(&mut m, &mut b).is_none());
        assert!(solve_in_place(&mut [0.0], &mut [1.0]).is_none());
    }
}
