//! Row and column block tensors.
//!
//! `row_block(C, D)` concatenates along the column modes with `L_s = J_s + K_s`:
//! `C` fills the index box `[J₁]×…×[J_M]`, `D` fills `Γ₁×…×Γ_M` with
//! `Γ_s = {J_s+1, …, J_s+K_s}`, and every other entry is zero. With more than
//! one column mode the result therefore has more columns than `C` and `D`
//! together; the extra columns are identically zero. `column_block` is the
//! same construction along the row modes.

use super::{ravel, unravel, QTensor, Shape};
use crate::error::{Error, Result};
use crate::Real;

impl<T: Real> QTensor<T> {
    /// The row block tensor `(C D)` with `self = C`.
    pub fn row_block(&self, d: &QTensor<T>) -> Result<QTensor<T>> {
        if self.row_dims() != d.row_dims() || self.col_dims().len() != d.col_dims().len() {
            return Err(Error::shape("row_block", format!("{} beside {}", self.shape(), d.shape())));
        }
        let cols: Vec<usize> = self.col_dims().iter().zip(d.col_dims()).map(|(a, b)| a + b).collect();
        let shape = Shape::new(self.row_dims().to_vec(), cols)?;
        let zeros_r = vec![0; self.row_dims().len()];
        let mut out = QTensor::zeros(shape);
        out.paste(self, &zeros_r, &vec![0; self.col_dims().len()]);
        out.paste(d, &zeros_r, self.col_dims());
        Ok(out)
    }

    /// The column block tensor stacking `self = A` over `b`.
    pub fn column_block(&self, b: &QTensor<T>) -> Result<QTensor<T>> {
        if self.col_dims() != b.col_dims() || self.row_dims().len() != b.row_dims().len() {
            return Err(Error::shape("column_block", format!("{} over {}", self.shape(), b.shape())));
        }
        let rows: Vec<usize> = self.row_dims().iter().zip(b.row_dims()).map(|(a, c)| a + c).collect();
        let shape = Shape::new(rows, self.col_dims().to_vec())?;
        let zeros_c = vec![0; self.col_dims().len()];
        let mut out = QTensor::zeros(shape);
        out.paste(self, &vec![0; self.row_dims().len()], &zeros_c);
        out.paste(b, self.row_dims(), &zeros_c);
        Ok(out)
    }

    /// Sub-tensor with the given per-mode offsets and shape; inverse of the
    /// block placement.
    pub fn extract(&self, row_offsets: &[usize], col_offsets: &[usize], shape: Shape) -> Result<QTensor<T>> {
        let fits = |off: &[usize], dims: &[usize], full: &[usize]| {
            off.len() == full.len()
                && dims.len() == full.len()
                && off.iter().zip(dims).zip(full).all(|((o, d), f)| o + d <= *f)
        };
        if !fits(row_offsets, shape.row_dims(), self.row_dims())
            || !fits(col_offsets, shape.col_dims(), self.col_dims())
        {
            return Err(Error::shape("extract", format!("{shape} at offsets outside {}", self.shape())));
        }
        let full_cols = self.shape().total_cols();
        Ok(QTensor::from_fn(shape, |r, c| {
            let rr: Vec<usize> = r.iter().zip(row_offsets).map(|(a, b)| a + b).collect();
            let cc: Vec<usize> = c.iter().zip(col_offsets).map(|(a, b)| a + b).collect();
            self.data[ravel(&rr, self.row_dims()) * full_cols + ravel(&cc, self.col_dims())]
        }))
    }

    /// Left and right parts `(C, D)` of a row block with `C`'s column dims `left`.
    pub fn split_row_block(&self, left: &[usize]) -> Result<(QTensor<T>, QTensor<T>)> {
        let right: Vec<usize> = self
            .col_dims()
            .iter()
            .zip(left)
            .map(|(l, j)| l.checked_sub(*j).filter(|k| *k > 0))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::shape("split_row_block", format!("{left:?} inside {}", self.shape())))?;
        let zr = vec![0; self.row_dims().len()];
        let c = self.extract(&zr, &vec![0; left.len()], Shape::new(self.row_dims().to_vec(), left.to_vec())?)?;
        let d = self.extract(&zr, left, Shape::new(self.row_dims().to_vec(), right)?)?;
        Ok((c, d))
    }

    /// Top and bottom parts `(A, B)` of a column block with `A`'s row dims `top`.
    pub fn split_column_block(&self, top: &[usize]) -> Result<(QTensor<T>, QTensor<T>)> {
        let bottom: Vec<usize> = self
            .row_dims()
            .iter()
            .zip(top)
            .map(|(l, j)| l.checked_sub(*j).filter(|k| *k > 0))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::shape("split_column_block", format!("{top:?} inside {}", self.shape())))?;
        let zc = vec![0; self.col_dims().len()];
        let a = self.extract(&vec![0; top.len()], &zc, Shape::new(top.to_vec(), self.col_dims().to_vec())?)?;
        let b = self.extract(top, &zc, Shape::new(bottom, self.col_dims().to_vec())?)?;
        Ok((a, b))
    }

    fn paste(&mut self, src: &QTensor<T>, row_offsets: &[usize], col_offsets: &[usize]) {
        let full_cols = self.shape().total_cols();
        let (nr, nc) = (src.shape().total_rows(), src.shape().total_cols());
        for r in 0..nr {
            let rr: Vec<usize> = unravel(r, src.row_dims()).iter().zip(row_offsets).map(|(a, b)| a + b).collect();
            let ro = ravel(&rr, self.row_dims());
            for c in 0..nc {
                let cc: Vec<usize> = unravel(c, src.col_dims()).iter().zip(col_offsets).map(|(a, b)| a + b).collect();
                let co = ravel(&cc, self.col_dims());
                self.data[ro * full_cols + co] = src.data[r * nc + c];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::qtensor::{QTensor, Shape};
    use crate::quat::Quaternion;

    fn filled(r: &[usize], c: &[usize], base: f64) -> QTensor<f64> {
        let shape = Shape::new(r.to_vec(), c.to_vec()).unwrap();
        let mut n = 0.0;
        QTensor::from_fn(shape, |_, _| {
            n += 1.0;
            Quaternion::new(base + n, n, -n, 0.5)
        })
    }

    #[test]
    fn row_block_places_blocks_on_the_diagonal_boxes() {
        let c = filled(&[2], &[1, 2], 0.0);
        let d = filled(&[2], &[2, 1], 100.0);
        let b = c.row_block(&d).unwrap();
        assert_eq!(b.col_dims(), &[3, 3]);
        assert_eq!(b.get(&[1], &[0, 1]).unwrap(), c.get(&[1], &[0, 1]).unwrap());
        assert_eq!(b.get(&[0], &[2, 2]).unwrap(), d.get(&[0], &[1, 0]).unwrap());
        // off-box entries stay zero
        assert_eq!(b.get(&[0], &[0, 2]).unwrap(), Quaternion::zero());
        assert_eq!(b.get(&[0], &[1, 0]).unwrap(), Quaternion::zero());
        let (c2, d2) = b.split_row_block(&[1, 2]).unwrap();
        assert_eq!((c2, d2), (c, d));
    }

    #[test]
    fn column_block_round_trip() {
        let a = filled(&[2, 1], &[3], 0.0);
        let b = filled(&[1, 2], &[3], 50.0);
        let s = a.column_block(&b).unwrap();
        assert_eq!(s.row_dims(), &[3, 3]);
        let (a2, b2) = s.split_column_block(&[2, 1]).unwrap();
        assert_eq!((a2, b2), (a, b));
    }

    #[test]
    fn block_shape_errors() {
        let a = filled(&[2], &[2], 0.0);
        let b = filled(&[3], &[2], 0.0);
        assert!(a.row_block(&b).is_err());
        assert!(a.column_block(&filled(&[2], &[3], 0.0)).is_err());
    }
}
