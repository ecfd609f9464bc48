use crate::pixmap::Image;

use super::TransitError;

/// Reconstruction quality plus channel counters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub mse: f64,
    /// `+inf` when `mse == 0`.
    pub psnr: f64,
    pub packets_received: usize,
    /// Codewords in which one bit was corrected.
    pub bits_corrected: usize,
    pub words_uncorrectable: usize,
}

pub fn mse(reference: &Image, candidate: &Image) -> Result<f64, TransitError> {
    let (a, b) = (
        (reference.width(), reference.height()),
        (candidate.width(), candidate.height()),
    );
    if a != b {
        return Err(TransitError::DimensionMismatch(a, b));
    }
    let sum: u64 = reference
        .pixels()
        .iter()
        .zip(candidate.pixels())
        .map(|(&r, &c)| {
            let d = r as i64 - c as i64;
            (d * d) as u64
        })
        .sum();
    Ok(sum as f64 / reference.pixels().len() as f64)
}

pub fn psnr(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0f64 * 255.0 / mse).log10()
    }
}

/// MSE and PSNR of `candidate` against `reference`; counters are left at zero.
pub fn compute_metrics(reference: &Image, candidate: &Image) -> Result<Metrics, TransitError> {
    let mse = mse(reference, candidate)?;
    Ok(Metrics {
        mse,
        psnr: psnr(mse),
        ..Metrics::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_images() {
        let a = Image::from_fn(5, 3, |x, y| (x * y) as u8);
        let m = compute_metrics(&a, &a).unwrap();
        assert_eq!(m.mse, 0.0);
        assert!(m.psnr.is_infinite() && m.psnr > 0.0);
    }

    #[test]
    fn one_pixel_off_by_full_scale() {
        let a = Image::new(2, 2, vec![0, 0, 0, 0]).unwrap();
        let b = Image::new(2, 2, vec![255, 0, 0, 0]).unwrap();
        let m = compute_metrics(&a, &b).unwrap();
        assert_eq!(m.mse, 16256.25);
        assert_eq!(compute_metrics(&b, &a).unwrap().mse, m.mse);
        assert!((m.psnr - 10.0 * 4f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let a = Image::filled(2, 2, 0);
        let b = Image::filled(2, 3, 0);
        assert!(matches!(
            compute_metrics(&a, &b),
            Err(TransitError::DimensionMismatch(_, _))
        ));
    }
}
