use super::matrix::{axpy, dot, sum_of_squares, DenseMatrix, DenseVector};
use crate::error::{Error, Result};

/// `A · B`.
pub fn matmul(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::shape("matmul", a.shape(), b.shape()));
    }
    let mut out = DenseMatrix::zeros(a.rows(), b.cols());
    matmul_into(a, b, &mut out);
    Ok(out)
}

/// [`matmul`] into a caller-owned buffer of the right shape.
pub(crate) fn matmul_into(a: &DenseMatrix, b: &DenseMatrix, out: &mut DenseMatrix) {
    debug_assert_eq!(out.shape(), (a.rows(), b.cols()));
    out.as_mut_slice().fill(0.0);
    let s = b.cols();
    for i in 0..a.rows() {
        let out_row = &mut out.as_mut_slice()[i * s..(i + 1) * s];
        for (l, &a_il) in a.row(i).iter().enumerate() {
            if a_il != 0.0 {
                axpy(a_il, b.row(l), out_row);
            }
        }
    }
}

/// `Aᵀ · B` without forming `Aᵀ`.
pub fn matmul_tn(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::shape("matmul_tn", a.shape(), b.shape()));
    }
    let mut out = DenseMatrix::zeros(a.cols(), b.cols());
    matmul_tn_into(a, b, &mut out);
    Ok(out)
}

/// [`matmul_tn`] into a caller-owned buffer of the right shape.
pub(crate) fn matmul_tn_into(a: &DenseMatrix, b: &DenseMatrix, out: &mut DenseMatrix) {
    debug_assert_eq!(out.shape(), (a.cols(), b.cols()));
    out.as_mut_slice().fill(0.0);
    let s = b.cols();
    for r in 0..a.rows() {
        let b_row = b.row(r);
        for (i, &a_ri) in a.row(r).iter().enumerate() {
            if a_ri != 0.0 {
                axpy(a_ri, b_row, &mut out.as_mut_slice()[i * s..(i + 1) * s]);
            }
        }
    }
}

/// `A · Bᵀ` without forming `Bᵀ`.
pub fn matmul_nt(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    if a.cols() != b.cols() {
        return Err(Error::shape("matmul_nt", a.shape(), b.shape()));
    }
    Ok(DenseMatrix::from_fn(a.rows(), b.rows(), |i, j| {
        dot(a.row(i), b.row(j))
    }))
}

/// `A · x`.
pub fn matvec(a: &DenseMatrix, x: &DenseVector) -> Result<DenseVector> {
    if a.cols() != x.len() {
        return Err(Error::shape("matvec", a.shape(), (x.len(), 1)));
    }
    Ok((0..a.rows())
        .map(|i| dot(a.row(i), x.as_slice()))
        .collect::<Vec<_>>()
        .into())
}

/// `Aᵀ · x`, streaming `A` row by row.
pub fn matvec_t(a: &DenseMatrix, x: &DenseVector) -> Result<DenseVector> {
    if a.rows() != x.len() {
        return Err(Error::shape("matvec_t", a.shape(), (x.len(), 1)));
    }
    let mut out = DenseVector::zeros(a.cols());
    for (r, &x_r) in x.as_slice().iter().enumerate() {
        if x_r != 0.0 {
            axpy(x_r, a.row(r), out.as_mut_slice());
        }
    }
    Ok(out)
}

/// Square root of the sum of squared entries.
pub fn frobenius_norm(m: &DenseMatrix) -> f64 {
    sum_of_squares(m.as_slice()).sqrt()
}

/// Euclidean norm of every column.
pub fn column_norms(m: &DenseMatrix) -> DenseVector {
    let mut acc = vec![0.0; m.cols()];
    for i in 0..m.rows() {
        for (s, x) in acc.iter_mut().zip(m.row(i)) {
            *s += x * x;
        }
    }
    acc.iter_mut().for_each(|s| *s = s.sqrt());
    acc.into()
}

/// Result shape of a Kronecker product, rejecting results whose byte size
/// does not fit the address space.
pub(crate) fn kron_shape(a: (usize, usize), b: (usize, usize)) -> Result<(usize, usize)> {
    let overflow = || Error::Dimension(format!("kron of {a:?} and {b:?} overflows the index range"));
    let rows = a.0.checked_mul(b.0).ok_or_else(overflow)?;
    let cols = a.1.checked_mul(b.1).ok_or_else(overflow)?;
    rows.checked_mul(cols)
        .and_then(|len| len.checked_mul(std::mem::size_of::<f64>()))
        .filter(|bytes| *bytes <= isize::MAX as usize)
        .ok_or_else(overflow)?;
    Ok((rows, cols))
}

/// `a · bᵀ`.
///
/// # Panics
/// If either vector is empty.
pub fn outer(a: &DenseVector, b: &DenseVector) -> DenseMatrix {
    DenseMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j])
}

/// Kronecker product. Column `j * t + j'` (0-based) of `A ⊗ B` is
/// `A[:, j] ⊗ B[:, j']` when `B` has `t` columns.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let (rows, cols) = kron_shape(a.shape(), b.shape())?;
    let mut out = DenseMatrix::zeros(rows, cols);
    let (s, t) = b.shape();
    for i in 0..a.rows() {
        for k in 0..s {
            let out_row = &mut out.as_mut_slice()[(i * s + k) * cols..(i * s + k + 1) * cols];
            let b_row = b.row(k);
            for (j, &a_ij) in a.row(i).iter().enumerate() {
                for (o, &b_kl) in out_row[j * t..(j + 1) * t].iter_mut().zip(b_row) {
                    *o = a_ij * b_kl;
                }
            }
        }
    }
    Ok(out)
}

/// Row-major flattening: element `(i, j)` (0-based) of a `p × q` matrix lands
/// at position `q * i + j`.
///
/// This ordering makes `stretch(A Z Aᵀ) == (A ⊗ A) · stretch(Z)`; a
/// column-major flattening would pair `Ω` with the transposed signal.
pub fn stretch(m: &DenseMatrix) -> DenseVector {
    DenseVector::from(m.as_slice())
}

/// Inverse of [`stretch`].
pub fn unstretch(v: &DenseVector, p: usize, q: usize) -> Result<DenseMatrix> {
    DenseMatrix::from_vec(p, q, v.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_rows(rows).unwrap()
    }

    fn naive_matmul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            let mut s = 0.0;
            for l in 0..a.cols() {
                s += a.get(i, l) * b.get(l, j);
            }
            s
        })
    }

    #[test]
    fn matmul_identity_and_small_product() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(matmul(&DenseMatrix::identity(2), &a).unwrap(), a);
        assert_eq!(matmul(&a, &DenseMatrix::identity(2)).unwrap(), a);

        let col = m(&[&[5.0], &[6.0]]);
        let expected = naive_matmul(&a, &col);
        assert_eq!(expected, m(&[&[17.0], &[39.0]]));
        assert_eq!(matmul(&a, &col).unwrap(), expected);
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let a = DenseMatrix::zeros(2, 3);
        let b = DenseMatrix::zeros(2, 3);
        let err = matmul(&a, &b).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("(2, 3)"), "{msg}");
        assert!(matches!(err, Error::Shape { .. }));
    }

    #[test]
    fn transpose_variants_match_explicit_transpose() {
        let a = DenseMatrix::from_fn(3, 4, |i, j| (i * 7 + j * 3) as f64 - 5.0);
        let b = DenseMatrix::from_fn(3, 2, |i, j| (i as f64) * 0.5 - j as f64);
        let c = DenseMatrix::from_fn(5, 4, |i, j| (i + 2 * j) as f64);
        assert_eq!(
            matmul_tn(&a, &b).unwrap(),
            naive_matmul(&a.transpose(), &b)
        );
        assert_eq!(
            matmul_nt(&a, &c).unwrap(),
            naive_matmul(&a, &c.transpose())
        );
        assert!(matmul_tn(&a, &c).is_err());
        assert!(matmul_nt(&a, &b).is_err());
    }

    #[test]
    fn frobenius_cases() {
        assert_eq!(frobenius_norm(&DenseMatrix::zeros(3, 2)), 0.0);
        assert_eq!(frobenius_norm(&DenseMatrix::identity(2)), 2f64.sqrt());
        // |a| = 2, |b| = 3
        let a = DenseVector::from(vec![2.0, 0.0]);
        let b = DenseVector::from(vec![0.0, 3.0, 0.0]);
        assert_eq!(frobenius_norm(&outer(&a, &b)), 6.0);
    }

    #[test]
    fn kron_cases() {
        assert_eq!(
            kron(&m(&[&[2.0]]), &m(&[&[3.0]])).unwrap(),
            m(&[&[6.0]])
        );
        assert_eq!(
            kron(&m(&[&[1.0, 2.0]]), &m(&[&[1.0, 2.0]])).unwrap(),
            m(&[&[1.0, 2.0, 2.0, 4.0]])
        );
        let b = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let k = kron(&DenseMatrix::identity(2), &b).unwrap();
        assert_eq!(
            k,
            m(&[
                &[1.0, 2.0, 0.0, 0.0],
                &[3.0, 4.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 2.0],
                &[0.0, 0.0, 3.0, 4.0],
            ])
        );
    }

    #[test]
    fn kron_overflow_rejected_before_allocation() {
        let huge = 1usize << 31;
        assert!(matches!(
            kron_shape((huge, huge), (huge, huge)),
            Err(Error::Dimension(_))
        ));
        assert!(kron_shape((usize::MAX, 1), (2, 1)).is_err());
        assert_eq!(kron_shape((3, 4), (5, 6)).unwrap(), (15, 24));
    }

    #[test]
    fn stretch_cases() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(stretch(&a).as_slice(), &[1.0, 2.0, 3.0, 4.0]);
        let row = m(&[&[5.0, -1.0, 2.5]]);
        assert_eq!(stretch(&row).as_slice(), row.as_slice());

        let u = DenseVector::from(vec![1.0, 2.0]);
        let v = DenseVector::from(vec![3.0, 4.0]);
        let s = stretch(&outer(&u, &v));
        assert_eq!(s.as_slice(), &[3.0, 4.0, 6.0, 8.0]);
        let ku = unstretch(&u, 2, 1).unwrap();
        let kv = unstretch(&v, 2, 1).unwrap();
        assert_eq!(kron(&ku, &kv).unwrap().as_slice(), s.as_slice());
    }

    #[test]
    fn unstretch_cases() {
        let v = DenseVector::from(vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            unstretch(&v, 2, 2).unwrap(),
            m(&[&[1.0, 2.0], &[3.0, 4.0]])
        );
        assert_eq!(
            unstretch(&DenseVector::from(vec![7.0]), 1, 1).unwrap(),
            m(&[&[7.0]])
        );
        assert!(unstretch(&v, 3, 2).is_err());
    }

    #[test]
    fn column_norms_match_columns() {
        let a = m(&[&[3.0, 0.0], &[4.0, -2.0]]);
        assert_eq!(column_norms(&a).as_slice(), &[5.0, 2.0]);
    }

    #[test]
    fn matvec_variants() {
        let a = m(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let x = DenseVector::from(vec![1.0, 0.0, -1.0]);
        assert_eq!(matvec(&a, &x).unwrap().as_slice(), &[-2.0, -2.0]);
        let y = DenseVector::from(vec![1.0, 1.0]);
        assert_eq!(matvec_t(&a, &y).unwrap().as_slice(), &[5.0, 7.0, 9.0]);
        assert!(matvec(&a, &y).is_err());
    }
}
