use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensor::Tensor1D;

/// Output of a window-2 / stride-2 max pool.
#[derive(Debug, Clone, PartialEq)]
pub struct Pooled<T> {
    pub output: Tensor1D<T>,
    /// Per channel, per output position: index into the input channel.
    pub argmax: Vec<usize>,
    pub input_len: usize,
}

pub fn maxpool1d<T: Scalar>(input: &Tensor1D<T>) -> Result<Pooled<T>> {
    let len = input.len();
    if len % 2 != 0 {
        return Err(Error::config(alloc::format!(
            "max pooling needs an even length, got {len}"
        )));
    }
    let half = len / 2;
    let mut output = Tensor1D::zeros(input.channels(), half);
    let mut argmax = Vec::with_capacity(input.channels() * half);
    for c in 0..input.channels() {
        let x = input.channel(c);
        let y = output.channel_mut(c);
        for (i, yi) in y.iter_mut().enumerate() {
            let (a, b) = (x[2 * i], x[2 * i + 1]);
            // ties go to the lower index
            if b > a {
                *yi = b;
                argmax.push(2 * i + 1);
            } else {
                *yi = a;
                argmax.push(2 * i);
            }
        }
    }
    Ok(Pooled {
        output,
        argmax,
        input_len: len,
    })
}

/// Routes each upstream gradient to the recorded argmax position.
pub fn maxpool1d_backward<T: Scalar>(pooled: &Pooled<T>, grad_out: &Tensor1D<T>) -> Result<Tensor1D<T>> {
    if !pooled.output.same_shape(grad_out) {
        return Err(Error::shape(
            "maxpool1d_backward",
            "elements",
            pooled.output.data().len(),
            grad_out.data().len(),
        ));
    }
    let half = grad_out.len();
    let mut d = Tensor1D::zeros(grad_out.channels(), pooled.input_len);
    for c in 0..grad_out.channels() {
        let g = grad_out.channel(c);
        let idx = &pooled.argmax[c * half..(c + 1) * half];
        let dx = d.channel_mut(c);
        for (&gi, &k) in g.iter().zip(idx) {
            dx[k] += gi;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pools_with_lower_index_ties() {
        let x = Tensor1D::<f64>::from_f64(&[1.0, 3.0, 2.0, 2.0]);
        let p = maxpool1d(&x).unwrap();
        assert_eq!(p.output.data(), &[3.0, 2.0]);
        assert_eq!(p.argmax, [1, 2]);
        let d = maxpool1d_backward(&p, &Tensor1D::from_f64(&[1.0, 1.0])).unwrap();
        assert_eq!(d.data(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn halves_length() {
        let p = maxpool1d(&Tensor1D::<f32>::zeros(3, 240)).unwrap();
        assert_eq!(p.output.len(), 120);
        assert_eq!(p.output.channels(), 3);
    }

    #[test]
    fn odd_length_rejected() {
        assert!(maxpool1d(&Tensor1D::<f64>::zeros(1, 5)).is_err());
    }
}
