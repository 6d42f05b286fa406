use crate::error::{check_len, invalid, Error, Result};
use crate::imaging::{convolve_periodic_raw, Kernel2D, RngState, Shape};
use crate::Scalar;

use super::{estimate_lipschitz, Denoiser, DenoiserFlags, LipschitzEstimate, LipschitzMethod};

/// Architecture and seed of a [`RandomConvNet`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvNetConfig {
    /// Number of 3x3 convolution layers, 2 or 3.
    pub layers: usize,
    /// Hidden channel count.
    pub channels: usize,
    /// Multiplier on the `1/sqrt(fan_in)` weight standard deviation.
    pub weight_scale: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
struct ConvLayer<T> {
    cin: usize,
    cout: usize,
    // Indexed `co * cin + ci`.
    kernels: Vec<Kernel2D<T>>,
    flipped: Vec<Kernel2D<T>>,
    bias: Vec<T>,
}

impl<T: Scalar> ConvLayer<T> {
    fn sample(cin: usize, cout: usize, weight_scale: f64, rng: &mut RngState) -> Result<Self> {
        let sd = weight_scale / ((9 * cin) as f64).sqrt();
        let kernels = (0..cin * cout)
            .map(|_| Kernel2D::new(3, rng.gaussian_vec::<f64>(9).into_iter().map(|w| T::of(sd * w)).collect()))
            .collect::<Result<Vec<_>>>()?;
        let flipped = kernels.iter().map(Kernel2D::flipped).collect();
        let bias = rng.gaussian_vec::<f64>(cout).into_iter().map(|b| T::of(0.1 * b)).collect();
        Ok(Self { cin, cout, kernels, flipped, bias })
    }

    fn forward(&self, shape: Shape, input: &[Vec<T>], with_bias: bool) -> Result<Vec<Vec<T>>> {
        (0..self.cout)
            .map(|co| {
                let b = if with_bias { self.bias[co] } else { T::zero() };
                let mut acc = vec![b; shape.len()];
                for (ci, chan) in input.iter().enumerate() {
                    let y = convolve_periodic_raw(shape, chan, &self.kernels[co * self.cin + ci])?;
                    acc.iter_mut().zip(y).for_each(|(a, v)| *a = *a + v);
                }
                Ok(acc)
            })
            .collect()
    }

    fn transpose(&self, shape: Shape, grad_out: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
        (0..self.cin)
            .map(|ci| {
                let mut acc = vec![T::zero(); shape.len()];
                for (co, g) in grad_out.iter().enumerate() {
                    let y = convolve_periodic_raw(shape, g, &self.flipped[co * self.cin + ci])?;
                    acc.iter_mut().zip(y).for_each(|(a, v)| *a = *a + v);
                }
                Ok(acc)
            })
            .collect()
    }
}

/// Residual-form denoiser `D(x) = x - N(x)` where `N` is a seeded, untrained
/// convolutional network: 3x3 periodic convolutions with `tanh` between
/// layers and a single input and output channel.
///
/// Jacobian products of `N` are computed exactly by forward- and
/// reverse-mode accumulation through the conv/tanh chain.
#[derive(Debug, Clone)]
pub struct RandomConvNet<T> {
    shape: Shape,
    config: ConvNetConfig,
    layers: Vec<ConvLayer<T>>,
}

impl<T: Scalar> RandomConvNet<T> {
    pub fn new(shape: Shape, config: ConvNetConfig) -> Result<Self> {
        if !(2..=3).contains(&config.layers) {
            return invalid(format!("convnet supports 2 or 3 layers, got {}", config.layers));
        }
        if config.channels == 0 {
            return invalid("convnet needs at least one hidden channel");
        }
        if !(config.weight_scale > 0.0) {
            return invalid("convnet weight_scale must be positive");
        }
        if shape.height < 3 || shape.width < 3 {
            return invalid(format!("convnet needs at least 3x3 images, got {shape}"));
        }
        let mut rng = RngState::new(config.seed);
        let c = config.channels;
        let mut layers = Vec::with_capacity(config.layers);
        for l in 0..config.layers {
            let cin = if l == 0 { 1 } else { c };
            let cout = if l + 1 == config.layers { 1 } else { c };
            layers.push(ConvLayer::sample(cin, cout, config.weight_scale, &mut rng)?);
        }
        Ok(Self { shape, config, layers })
    }

    pub fn config(&self) -> &ConvNetConfig {
        &self.config
    }

    /// Hidden activations (post-tanh) of every layer but the last, and the output `N(x)`.
    fn trace(&self, x: &[T]) -> Result<(Vec<Vec<Vec<T>>>, Vec<T>)> {
        check_len("convnet input", self.shape.len(), x.len())?;
        let mut acts = Vec::with_capacity(self.layers.len() - 1);
        let mut cur = vec![x.to_vec()];
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = layer.forward(self.shape, &cur, true)?;
            if l + 1 == self.layers.len() {
                return Ok((acts, z.pop().expect("single output channel")));
            }
            z.iter_mut().for_each(|ch| ch.iter_mut().for_each(|v| *v = v.tanh()));
            acts.push(z.clone());
            cur = z;
        }
        unreachable!("network has at least one layer")
    }

    /// `N(x)`
    pub fn network(&self, x: &[T]) -> Result<Vec<T>> {
        Ok(self.trace(x)?.1)
    }

    fn tanh_prime(act: &[Vec<T>], grad: &mut [Vec<T>]) {
        for (g, a) in grad.iter_mut().zip(act) {
            for (gi, &ai) in g.iter_mut().zip(a) {
                *gi = *gi * (T::one() - ai * ai);
            }
        }
    }
}

impl<T: Scalar> Denoiser<T> for RandomConvNet<T> {
    fn dim(&self) -> usize {
        self.shape.len()
    }

    fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        let n = self.network(x)?;
        Ok(x.iter().zip(n).map(|(&a, b)| a - b).collect())
    }

    /// `J_N(x)^T v` by reverse-mode accumulation.
    fn residual_vjp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        check_len("convnet cotangent", self.shape.len(), v.len())?;
        let (acts, _) = self.trace(x)?;
        let mut grad = vec![v.to_vec()];
        for l in (0..self.layers.len()).rev() {
            grad = self.layers[l].transpose(self.shape, &grad)?;
            if l > 0 {
                Self::tanh_prime(&acts[l - 1], &mut grad);
            }
        }
        grad.pop().ok_or_else(|| Error::Undefined("empty gradient".into()))
    }

    /// `J_N(x) v` by forward-mode accumulation.
    fn residual_jvp(&self, x: &[T], v: &[T]) -> Result<Vec<T>> {
        check_len("convnet tangent", self.shape.len(), v.len())?;
        let (acts, _) = self.trace(x)?;
        let mut tangent = vec![v.to_vec()];
        for (l, layer) in self.layers.iter().enumerate() {
            tangent = layer.forward(self.shape, &tangent, false)?;
            if l < acts.len() {
                Self::tanh_prime(&acts[l], &mut tangent);
            }
        }
        tangent.pop().ok_or_else(|| Error::Undefined("empty tangent".into()))
    }

    fn flags(&self) -> DenoiserFlags {
        DenoiserFlags { symmetric_jacobian: false, smooth: true, has_vjp: true }
    }

    fn label(&self) -> String {
        format!(
            "convnet(layers={}, channels={}, weight_scale={}, seed={})",
            self.config.layers, self.config.channels, self.config.weight_scale, self.config.seed
        )
    }
}

/// Searches `weight_scale` (bisection in log space) until the Jacobian
/// power-iteration Lipschitz estimate of the network lands in `[lo, hi]`.
///
/// Returns the scale and the estimate that certified it.
pub fn calibrate_weight_scale(
    shape: Shape,
    mut config: ConvNetConfig,
    lo: f64,
    hi: f64,
    probes: usize,
    iters: usize,
    seed: u64,
) -> Result<(f64, LipschitzEstimate<f64>)> {
    if !(lo < hi) {
        return invalid("calibration range must satisfy lo < hi");
    }
    let target = 0.5 * (lo + hi);
    let (mut a, mut b) = (1e-3f64.ln(), 1e2f64.ln());
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        config.weight_scale = mid.exp();
        let net = RandomConvNet::<f64>::new(shape, config)?;
        let est = estimate_lipschitz(
            &net,
            LipschitzMethod::JacobianPowerIteration,
            probes,
            iters,
            &mut RngState::new(seed),
        )?;
        if est.value >= lo && est.value <= hi {
            return Ok((config.weight_scale, est));
        }
        if est.value < target {
            a = mid;
        } else {
            b = mid;
        }
    }
    Err(Error::Undefined(format!("no weight scale reached Lipschitz range [{lo}, {hi}]")))
}
