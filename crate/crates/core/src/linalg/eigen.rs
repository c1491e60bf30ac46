//! Eigenvalues of general (non-symmetric) real matrices: Hessenberg reduction
//! by stabilized elementary similarities followed by the Francis double-shift
//! QR iteration.

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A complex eigenvalue `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue<T> {
    pub re: T,
    pub im: T,
}

/// All eigenvalues of `a`, sorted by real part then imaginary part.
pub fn eigenvalues<T: Scalar>(a: &Matrix<T>) -> Result<Vec<Eigenvalue<T>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
    }
    let n = a.rows();
    // 1-based working copy
    let mut h = vec![vec![T::zero(); n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            h[i + 1][j + 1] = a[(i, j)];
        }
    }
    to_hessenberg(&mut h, n);
    let mut wr = vec![T::zero(); n + 1];
    let mut wi = vec![T::zero(); n + 1];
    hqr(&mut h, n, &mut wr, &mut wi)?;
    let mut out: Vec<Eigenvalue<T>> = (1..=n).map(|i| Eigenvalue { re: wr[i], im: wi[i] }).collect();
    out.sort_by(|x, y| {
        x.re.partial_cmp(&y.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(x.im.partial_cmp(&y.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(out)
}

fn to_hessenberg<T: Scalar>(a: &mut [Vec<T>], n: usize) {
    for m in 2..n {
        let mut x = T::zero();
        let mut i = m;
        for j in m..=n {
            if a[j][m - 1].abs() > x.abs() {
                x = a[j][m - 1];
                i = j;
            }
        }
        if i != m {
            for j in (m - 1)..=n {
                let t = a[i][j];
                a[i][j] = a[m][j];
                a[m][j] = t;
            }
            for row in a.iter_mut().take(n + 1).skip(1) {
                row.swap(i, m);
            }
        }
        if x != T::zero() {
            for i in (m + 1)..=n {
                let mut y = a[i][m - 1];
                if y != T::zero() {
                    y = y / x;
                    a[i][m - 1] = y;
                    for j in m..=n {
                        a[i][j] = a[i][j] - y * a[m][j];
                    }
                    for row in a.iter_mut().take(n + 1).skip(1) {
                        row[m] = row[m] + y * row[i];
                    }
                }
            }
        }
    }
    for i in 1..=n {
        for j in 1..=n {
            if i > j + 1 {
                a[i][j] = T::zero();
            }
        }
    }
}

fn sign<T: Scalar>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

#[allow(clippy::many_single_char_names)]
fn hqr<T: Scalar>(a: &mut [Vec<T>], n: usize, wr: &mut [T], wi: &mut [T]) -> Result<()> {
    let zero = T::zero();
    let mut anorm = zero;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm = anorm + a[i][j].abs();
        }
    }
    let mut nn = n;
    let mut t = zero;
    let (mut p, mut q, mut r);
    let (mut x, mut y, mut z, mut w);
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == zero {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = zero;
                    break;
                }
                l -= 1;
            }
            x = a[nn][nn];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = zero;
                nn -= 1;
            } else {
                y = a[nn - 1][nn - 1];
                w = a[nn][nn - 1] * a[nn - 1][nn];
                if l == nn - 1 {
                    p = T::half() * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x = x + t;
                    if q >= zero {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != zero {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = zero;
                        wi[nn] = zero;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        return Err(Error::NoConvergence { gap: a[nn][nn - 1].abs().as_f64() });
                    }
                    if its == 10 || its == 20 {
                        t = t + x;
                        for i in 1..=nn {
                            a[i][i] = a[i][i] - x;
                        }
                        let s = a[nn][nn - 1].abs() + a[nn - 1][nn - 2].abs();
                        x = T::c(0.75) * s;
                        y = x;
                        w = T::c(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nn - 2;
                    loop {
                        z = a[m][m];
                        r = x - z;
                        let s0 = y - z;
                        p = (r * s0 - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - r - s0;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p = p / s;
                        q = q / s;
                        r = r / s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in (m + 2)..=nn {
                        a[i][i - 2] = zero;
                        if i != m + 2 {
                            a[i][i - 3] = zero;
                        }
                    }
                    let mut k = m;
                    while k + 1 <= nn {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = zero;
                            if k != nn - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != zero {
                                p = p / x;
                                q = q / x;
                                r = r / x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != zero {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p = p + s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q = q / p;
                            r = r / p;
                            for j in k..=nn {
                                p = a[k][j] + q * a[k + 1][j];
                                if k != nn - 1 {
                                    p = p + r * a[k + 2][j];
                                    a[k + 2][j] = a[k + 2][j] - p * z;
                                }
                                a[k + 1][j] = a[k + 1][j] - p * y;
                                a[k][j] = a[k][j] - p * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[i][k] + y * a[i][k + 1];
                                if k != nn - 1 {
                                    p = p + z * a[i][k + 2];
                                    a[i][k + 2] = a[i][k + 2] - p * r;
                                }
                                a[i][k + 1] = a[i][k + 1] - p * q;
                                a[i][k] = a[i][k] - p;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 2 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok(())
}
