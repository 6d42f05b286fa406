use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{check_len, invalid, Error, Result};
use crate::Scalar;

/// Square convolution kernel with odd side length, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel2D<T> {
    size: usize,
    weights: Vec<T>,
}

impl<T: Scalar> Kernel2D<T> {
    pub fn new(size: usize, weights: Vec<T>) -> Result<Self> {
        if size == 0 || size % 2 == 0 {
            return invalid(format!("kernel size must be odd and positive, got {size}"));
        }
        check_len("kernel weights", size * size, weights.len())?;
        if weights.iter().any(|w| !w.is_finite()) {
            return invalid("kernel contains non-finite weights");
        }
        Ok(Self { size, weights })
    }

    /// Normalized box kernel.
    pub fn uniform(size: usize) -> Result<Self> {
        let w = T::one() / T::of_usize(size * size);
        Self::new(size, vec![w; size * size])
    }

    /// Normalized isotropic Gaussian with an explicit odd size.
    pub fn gaussian(size: usize, sigma: T) -> Result<Self> {
        if !(sigma > T::zero()) {
            return invalid("gaussian sigma must be positive");
        }
        if size == 0 || size % 2 == 0 {
            return invalid(format!("kernel size must be odd and positive, got {size}"));
        }
        let c = (size / 2) as isize;
        let two_s2 = T::of(2.0) * sigma * sigma;
        let mut weights = Vec::with_capacity(size * size);
        for a in -c..=c {
            for b in -c..=c {
                let r2 = T::of((a * a + b * b) as f64);
                weights.push((-r2 / two_s2).exp());
            }
        }
        let total: T = weights.iter().copied().sum();
        for w in &mut weights {
            *w = *w / total;
        }
        Self::new(size, weights)
    }

    /// Gaussian truncated at four standard deviations: radius `ceil(4 sigma)`.
    pub fn gaussian_truncated(sigma: T) -> Result<Self> {
        if !(sigma > T::zero()) {
            return invalid("gaussian sigma must be positive");
        }
        let radius = (T::of(4.0) * sigma).ceil().to_usize().unwrap_or(0).max(1);
        Self::gaussian(2 * radius + 1, sigma)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radius(&self) -> usize {
        self.size / 2
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Weight at offset `(da, db)` from the center.
    #[inline]
    pub fn at(&self, da: isize, db: isize) -> T {
        let c = self.radius() as isize;
        self.weights[((da + c) as usize) * self.size + (db + c) as usize]
    }

    /// Kernel rotated by 180 degrees (the adjoint of convolution).
    pub fn flipped(&self) -> Self {
        let mut weights = self.weights.clone();
        weights.reverse();
        Self { size: self.size, weights }
    }

    pub fn sum(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Non-negative weights summing to one within `1e-12`.
    pub fn is_normalized(&self) -> bool {
        self.weights.iter().all(|&w| w >= T::zero())
            && (self.sum() - T::one()).abs().as_f64() <= 1e-12
    }

    /// Magnitude of the 2D DFT of the kernel zero-padded (periodically
    /// wrapped) to `height x width`, evaluated by direct summation.
    pub fn dft_magnitudes(&self, height: usize, width: usize) -> Vec<T> {
        let c = self.radius() as isize;
        let mut out = Vec::with_capacity(height * width);
        for u in 0..height {
            for v in 0..width {
                let (mut re, mut im) = (0.0f64, 0.0f64);
                for a in -c..=c {
                    for b in -c..=c {
                        let w = self.at(a, b).as_f64();
                        let ang = -2.0
                            * std::f64::consts::PI
                            * ((u as f64) * (a as f64) / height as f64
                                + (v as f64) * (b as f64) / width as f64);
                        re += w * ang.cos();
                        im += w * ang.sin();
                    }
                }
                out.push(T::of((re * re + im * im).sqrt()));
            }
        }
        out
    }

    /// Reads the plain-text kernel format: first token `k`, then `k*k`
    /// whitespace-separated reals in row-major order.
    pub fn read_text(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_text(&text)
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let size: usize = tokens
            .next()
            .ok_or_else(|| Error::Format("empty kernel file".into()))?
            .parse()
            .map_err(|e| Error::Format(format!("kernel size: {e}")))?;
        let weights = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map(T::of)
                    .map_err(|e| Error::Format(format!("kernel weight {t:?}: {e}")))
            })
            .collect::<Result<Vec<T>>>()?;
        if weights.len() != size * size {
            return Err(Error::Format(format!(
                "kernel of size {size} needs {} weights, found {}",
                size * size,
                weights.len()
            )));
        }
        Self::new(size, weights)
    }

    pub fn write_text(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{}", self.size)?;
        for row in self.weights.chunks(self.size) {
            let line: Vec<String> = row.iter().map(|w| format!("{:e}", w.as_f64())).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn read_from(reader: impl BufRead) -> Result<Self> {
        let text = std::io::read_to_string(reader)?;
        Self::parse_text(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_normalized_and_symmetric() {
        let k = Kernel2D::<f64>::gaussian(17, 3.0).unwrap();
        assert!(k.is_normalized());
        assert_eq!(k.flipped(), k);
        let t = Kernel2D::<f64>::gaussian_truncated(1.5).unwrap();
        assert_eq!(t.size(), 13);
    }

    #[test]
    fn even_size_rejected() {
        assert!(Kernel2D::<f64>::new(2, vec![0.25; 4]).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let k = Kernel2D::<f64>::gaussian(5, 1.0).unwrap();
        let mut buf = Vec::new();
        k.write_text(&mut buf).unwrap();
        let back = Kernel2D::<f64>::read_from(&buf[..]).unwrap();
        assert_eq!(back, k);
        assert!(Kernel2D::<f64>::parse_text("3\n1 2 3").is_err());
    }

    #[test]
    fn dft_magnitude_peaks_at_dc_for_normalized_kernel() {
        let k = Kernel2D::<f64>::gaussian(5, 1.0).unwrap();
        let mags = k.dft_magnitudes(16, 16);
        assert!((mags[0] - 1.0).abs() < 1e-14);
        assert!(mags.iter().all(|&m| m <= 1.0 + 1e-14));
    }
}
