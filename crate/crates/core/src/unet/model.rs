use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use super::config::ArchitectureConfig;
use super::layout::{BlockKind, BlockLayout, LayerKind, Layout};
use crate::error::{Error, Result};
use crate::ops::{
    self, BatchNormCache, BatchNormParams, ConvParams, ConvSpec, Mode, Pooled, RunningStats,
};
use crate::rng;
use crate::scalar::Scalar;
use crate::tensor::Tensor1D;

#[derive(Debug, Clone, PartialEq)]
pub enum Layer<T> {
    Conv { spec: ConvSpec, params: ConvParams<T> },
    ConvTranspose { spec: ConvSpec, params: ConvParams<T> },
    BatchNorm(BatchNormParams<T>),
    Relu,
    MaxPool,
}

#[derive(Debug, Clone, PartialEq)]
struct Block<T> {
    layout: BlockLayout,
    layers: Vec<Layer<T>>,
}

/// A built network: parameters for every block of a [`Layout`].
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    config: ArchitectureConfig,
    seed: u64,
    layout: Layout,
    blocks: Vec<Block<T>>,
    version: u64,
}

#[derive(Debug, Clone)]
enum LayerCache<T> {
    Input(Vec<Tensor1D<T>>),
    BatchNorm {
        cache: BatchNormCache<T>,
        stats: RunningStats<T>,
    },
    Relu(Vec<Tensor1D<T>>),
    Pool(Vec<Pooled<T>>),
}

/// Everything a train-mode forward pass keeps for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache<T> {
    version: u64,
    batch_size: usize,
    blocks: Vec<Vec<LayerCache<T>>>,
    /// Output length of every block, in execution order.
    pub block_lengths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum LayerGrad<T> {
    Conv { weight: Vec<T>, bias: Vec<T> },
    BatchNorm { gamma: Vec<T>, beta: Vec<T> },
    None,
}

/// Gradients of every trainable parameter plus the input gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelGrads<T> {
    layers: Vec<Vec<LayerGrad<T>>>,
    pub d_input: Vec<Tensor1D<T>>,
}

impl<T: Scalar> ModelGrads<T> {
    /// Gradient buffers in the same order as [`Model::params_mut`].
    pub fn tensors(&self) -> Vec<&[T]> {
        let mut out = Vec::new();
        for block in &self.layers {
            for g in block {
                match g {
                    LayerGrad::Conv { weight, bias } => {
                        out.push(weight.as_slice());
                        out.push(bias.as_slice());
                    }
                    LayerGrad::BatchNorm { gamma, beta } => {
                        out.push(gamma.as_slice());
                        out.push(beta.as_slice());
                    }
                    LayerGrad::None => {}
                }
            }
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [T]> {
        let mut out = Vec::new();
        for block in &mut self.layers {
            for g in block {
                match g {
                    LayerGrad::Conv { weight, bias } => {
                        out.push(weight.as_mut_slice());
                        out.push(bias.as_mut_slice());
                    }
                    LayerGrad::BatchNorm { gamma, beta } => {
                        out.push(gamma.as_mut_slice());
                        out.push(beta.as_mut_slice());
                    }
                    LayerGrad::None => {}
                }
            }
        }
        out
    }
}

/// A parameter or running-statistics buffer with a stable name.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTensor<'a, T> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: &'a [T],
}

fn init_conv<T: Scalar>(spec: &ConvSpec, fan_in: usize, rng: &mut rng::Rng) -> ConvParams<T> {
    let bound = num_traits::Float::sqrt(6.0 / fan_in.max(1) as f64);
    let mut p = ConvParams::zeros(spec);
    for w in &mut p.weight {
        *w = T::lit(rng.random_range(-bound..bound));
    }
    p
}

fn map_batch<T: Scalar>(
    batch: &[Tensor1D<T>],
    f: impl Fn(&Tensor1D<T>) -> Result<Tensor1D<T>>,
) -> Result<Vec<Tensor1D<T>>> {
    batch.iter().map(f).collect()
}

fn add_into<T: Scalar>(acc: &mut [T], add: &[T]) {
    for (a, &b) in acc.iter_mut().zip(add) {
        *a += b;
    }
}

impl<T: Scalar> Layer<T> {
    fn forward_train(&self, input: Vec<Tensor1D<T>>) -> Result<(Vec<Tensor1D<T>>, LayerCache<T>)> {
        match self {
            Layer::Conv { spec, params } => {
                let out = map_batch(&input, |x| ops::conv1d(x, spec, params))?;
                Ok((out, LayerCache::Input(input)))
            }
            Layer::ConvTranspose { spec, params } => {
                let out = map_batch(&input, |x| ops::conv_transpose1d(x, spec, params))?;
                Ok((out, LayerCache::Input(input)))
            }
            Layer::BatchNorm(params) => {
                let (out, cache, stats) = ops::batchnorm_train(&input, params)?;
                Ok((out, LayerCache::BatchNorm { cache, stats }))
            }
            Layer::Relu => {
                let out = input.iter().map(ops::relu).collect();
                Ok((out, LayerCache::Relu(input)))
            }
            Layer::MaxPool => {
                let pooled: Vec<Pooled<T>> = input.iter().map(ops::maxpool1d).collect::<Result<_>>()?;
                let out = pooled.iter().map(|p| p.output.clone()).collect();
                Ok((out, LayerCache::Pool(pooled)))
            }
        }
    }

    fn forward_infer(&self, x: &Tensor1D<T>) -> Result<Tensor1D<T>> {
        match self {
            Layer::Conv { spec, params } => ops::conv1d(x, spec, params),
            Layer::ConvTranspose { spec, params } => ops::conv_transpose1d(x, spec, params),
            Layer::BatchNorm(params) => ops::batchnorm_infer(x, params),
            Layer::Relu => Ok(ops::relu(x)),
            Layer::MaxPool => Ok(ops::maxpool1d(x)?.output),
        }
    }

    fn backward(
        &self,
        cache: &LayerCache<T>,
        grad: Vec<Tensor1D<T>>,
    ) -> Result<(Vec<Tensor1D<T>>, LayerGrad<T>)> {
        match (self, cache) {
            (Layer::Conv { spec, params }, LayerCache::Input(input))
            | (Layer::ConvTranspose { spec, params }, LayerCache::Input(input)) => {
                let transpose = matches!(self, Layer::ConvTranspose { .. });
                let mut weight = vec![T::zero(); params.weight.len()];
                let mut bias = vec![T::zero(); params.bias.len()];
                let mut d_in = Vec::with_capacity(grad.len());
                for (x, g) in input.iter().zip(&grad) {
                    let gr = if transpose {
                        ops::conv_transpose1d_backward(x, spec, params, g)?
                    } else {
                        ops::conv1d_backward(x, spec, params, g)?
                    };
                    add_into(&mut weight, &gr.d_weight);
                    add_into(&mut bias, &gr.d_bias);
                    d_in.push(gr.d_input);
                }
                Ok((d_in, LayerGrad::Conv { weight, bias }))
            }
            (Layer::BatchNorm(params), LayerCache::BatchNorm { cache, .. }) => {
                let g = ops::batchnorm_backward(cache, params, &grad)?;
                Ok((
                    g.d_input,
                    LayerGrad::BatchNorm {
                        gamma: g.d_gamma,
                        beta: g.d_beta,
                    },
                ))
            }
            (Layer::Relu, LayerCache::Relu(input)) => {
                let d = input
                    .iter()
                    .zip(&grad)
                    .map(|(x, g)| ops::relu_backward(x, g))
                    .collect::<Result<_>>()?;
                Ok((d, LayerGrad::None))
            }
            (Layer::MaxPool, LayerCache::Pool(pooled)) => {
                let d = pooled
                    .iter()
                    .zip(&grad)
                    .map(|(p, g)| ops::maxpool1d_backward(p, g))
                    .collect::<Result<_>>()?;
                Ok((d, LayerGrad::None))
            }
            _ => Err(Error::Cache("layer cache does not match layer kind")),
        }
    }
}

impl<T: Scalar> Block<T> {
    fn forward_train(&self, mut x: Vec<Tensor1D<T>>) -> Result<(Vec<Tensor1D<T>>, Vec<LayerCache<T>>)> {
        let mut caches = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let (y, c) = layer.forward_train(x)?;
            caches.push(c);
            x = y;
        }
        Ok((x, caches))
    }

    fn forward_infer(&self, x: &Tensor1D<T>) -> Result<Tensor1D<T>> {
        let mut cur = self.layers[0].forward_infer(x)?;
        for layer in &self.layers[1..] {
            cur = layer.forward_infer(&cur)?;
        }
        Ok(cur)
    }

    fn backward(
        &self,
        caches: &[LayerCache<T>],
        mut grad: Vec<Tensor1D<T>>,
    ) -> Result<(Vec<Tensor1D<T>>, Vec<LayerGrad<T>>)> {
        if caches.len() != self.layers.len() {
            return Err(Error::Cache("block cache length mismatch"));
        }
        let mut grads = vec![LayerGrad::None; self.layers.len()];
        for (i, (layer, cache)) in self.layers.iter().zip(caches).enumerate().rev() {
            let (g, pg) = layer.backward(cache, grad)?;
            grads[i] = pg;
            grad = g;
        }
        Ok((grad, grads))
    }
}

fn concat_batch<T: Scalar>(main: &[Tensor1D<T>], skip: &[Tensor1D<T>]) -> Result<Vec<Tensor1D<T>>> {
    main.iter()
        .zip(skip)
        .map(|(a, b)| ops::concat_channels(a, b))
        .collect()
}

impl<T: Scalar> Model<T> {
    /// Builds a model with He-style uniform weights drawn from `seed`,
    /// zero biases and identity batchnorm.
    pub fn build(config: &ArchitectureConfig, seed: u64) -> Result<Self> {
        let layout = Layout::new(config)?;
        let mut rng = rng::seeded(seed);
        let mut blocks = Vec::with_capacity(layout.blocks.len());
        for bl in &layout.blocks {
            let mut layers = Vec::with_capacity(bl.layers.len());
            for desc in &bl.layers {
                layers.push(match desc.kind {
                    LayerKind::Conv(spec) => Layer::Conv {
                        spec,
                        params: init_conv(&spec, spec.in_channels() * spec.kernel_size(), &mut rng),
                    },
                    LayerKind::ConvTranspose(spec) => Layer::ConvTranspose {
                        spec,
                        params: init_conv(
                            &spec,
                            spec.in_channels() * spec.kernel_size() / spec.stride(),
                            &mut rng,
                        ),
                    },
                    LayerKind::BatchNorm => Layer::BatchNorm(BatchNormParams::new(desc.out_channels)),
                    LayerKind::Relu => Layer::Relu,
                    LayerKind::MaxPool => Layer::MaxPool,
                });
            }
            blocks.push(Block {
                layout: bl.clone(),
                layers,
            });
        }
        Ok(Self {
            config: *config,
            seed,
            layout,
            blocks,
            version: 0,
        })
    }

    pub fn config(&self) -> &ArchitectureConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn layers(&self, block: usize) -> &[Layer<T>] {
        &self.blocks[block].layers
    }

    pub fn layers_mut(&mut self, block: usize) -> &mut [Layer<T>] {
        self.version += 1;
        &mut self.blocks[block].layers
    }

    fn check_input(&self, x: &Tensor1D<T>) -> Result<()> {
        if x.channels() != 1 {
            return Err(Error::shape("unet forward", "input channels", 1, x.channels()));
        }
        if x.len() != self.config.bands {
            return Err(Error::shape("unet forward", "bands", self.config.bands, x.len()));
        }
        if let Some(i) = x.data().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "unet forward input",
                location: format!("band {i}"),
            });
        }
        Ok(())
    }

    pub fn forward(
        &self,
        batch: &[Tensor1D<T>],
        mode: Mode,
    ) -> Result<(Vec<Tensor1D<T>>, Option<ForwardCache<T>>)> {
        match mode {
            Mode::Train => {
                let (y, cache) = self.forward_train(batch)?;
                Ok((y, Some(cache)))
            }
            Mode::Infer => Ok((self.infer(batch)?, None)),
        }
    }

    /// Train-mode pass: batch statistics in every batchnorm, and a cache for
    /// [`Model::backward`]. Updated running statistics travel in the cache and
    /// are applied by [`Model::commit_running_stats`].
    pub fn forward_train(&self, batch: &[Tensor1D<T>]) -> Result<(Vec<Tensor1D<T>>, ForwardCache<T>)> {
        for x in batch {
            self.check_input(x)?;
        }
        let depth = self.config.depth;
        let mut caches = Vec::with_capacity(self.blocks.len());
        let mut lengths = Vec::with_capacity(self.blocks.len());
        let mut skips = Vec::with_capacity(depth);
        let mut x = batch.to_vec();
        for block in &self.blocks[..depth] {
            let (y, c) = block.forward_train(x)?;
            caches.push(c);
            lengths.push(y[0].len());
            skips.push(y.clone());
            x = y;
        }
        let (y, c) = self.blocks[depth].forward_train(x)?;
        caches.push(c);
        lengths.push(y[0].len());
        x = y;
        for d in 0..depth {
            let level = depth - d;
            let v = concat_batch(&x, &skips[level - 1])?;
            let (y, c) = self.blocks[depth + 1 + d].forward_train(v)?;
            caches.push(c);
            lengths.push(y[0].len());
            x = y;
        }
        let (y, c) = self.blocks[2 * depth + 1].forward_train(x)?;
        caches.push(c);
        lengths.push(y[0].len());
        Ok((
            y,
            ForwardCache {
                version: self.version,
                batch_size: batch.len(),
                blocks: caches,
                block_lengths: lengths,
            },
        ))
    }

    /// Exact gradients of every parameter given `dL/d(output)`.
    pub fn backward(&self, cache: &ForwardCache<T>, grad_out: &[Tensor1D<T>]) -> Result<ModelGrads<T>> {
        if cache.version != self.version {
            return Err(Error::Cache("parameters changed since the forward pass"));
        }
        if cache.blocks.len() != self.blocks.len() {
            return Err(Error::Cache("cache belongs to a different architecture"));
        }
        if grad_out.len() != cache.batch_size {
            return Err(Error::shape(
                "unet backward",
                "batch size",
                cache.batch_size,
                grad_out.len(),
            ));
        }
        let depth = self.config.depth;
        let mut grads = vec![Vec::new(); self.blocks.len()];
        let out_idx = 2 * depth + 1;
        let (mut g, pg) = self.blocks[out_idx].backward(&cache.blocks[out_idx], grad_out.to_vec())?;
        grads[out_idx] = pg;
        let mut skip_grads: Vec<Vec<Tensor1D<T>>> = vec![Vec::new(); depth];
        for d in (0..depth).rev() {
            let idx = depth + 1 + d;
            let level = depth - d;
            let (gv, pg) = self.blocks[idx].backward(&cache.blocks[idx], g)?;
            grads[idx] = pg;
            let main = self.layout.main_in_channels(idx);
            let mut g_main = Vec::with_capacity(gv.len());
            let mut g_skip = Vec::with_capacity(gv.len());
            for t in &gv {
                let (a, b) = ops::split_channels(t, main)?;
                g_main.push(a);
                g_skip.push(b);
            }
            skip_grads[level - 1] = g_skip;
            g = g_main;
        }
        let (mut g2, pg) = self.blocks[depth].backward(&cache.blocks[depth], g)?;
        grads[depth] = pg;
        for level in (1..=depth).rev() {
            // encoder outputs feed both the next stage and a decoder
            for (a, b) in g2.iter_mut().zip(&skip_grads[level - 1]) {
                add_into(a.data_mut(), b.data());
            }
            let (gi, pg) = self.blocks[level - 1].backward(&cache.blocks[level - 1], g2)?;
            grads[level - 1] = pg;
            g2 = gi;
        }
        Ok(ModelGrads {
            layers: grads,
            d_input: g2,
        })
    }

    /// Applies the running statistics computed by a train-mode pass.
    pub fn commit_running_stats(&mut self, cache: &ForwardCache<T>) -> Result<()> {
        if cache.blocks.len() != self.blocks.len() {
            return Err(Error::Cache("cache belongs to a different architecture"));
        }
        for (block, caches) in self.blocks.iter_mut().zip(&cache.blocks) {
            for (layer, c) in block.layers.iter_mut().zip(caches) {
                if let (Layer::BatchNorm(p), LayerCache::BatchNorm { stats, .. }) = (layer, c) {
                    p.running_mean.clone_from(&stats.mean);
                    p.running_var.clone_from(&stats.var);
                }
            }
        }
        Ok(())
    }

    /// Inference pass on a batch, using running statistics.
    pub fn infer(&self, batch: &[Tensor1D<T>]) -> Result<Vec<Tensor1D<T>>> {
        batch.iter().map(|x| self.infer_one(x)).collect()
    }

    pub fn infer_one(&self, x: &Tensor1D<T>) -> Result<Tensor1D<T>> {
        Ok(self.infer_traced(x)?.0)
    }

    /// Inference pass that also reports each block's output length.
    pub fn infer_traced(&self, x: &Tensor1D<T>) -> Result<(Tensor1D<T>, Vec<usize>)> {
        self.check_input(x)?;
        let depth = self.config.depth;
        let mut lengths = Vec::with_capacity(self.blocks.len());
        let mut skips = Vec::with_capacity(depth);
        let mut cur = x.clone();
        for block in &self.blocks[..depth] {
            cur = block.forward_infer(&cur)?;
            lengths.push(cur.len());
            skips.push(cur.clone());
        }
        cur = self.blocks[depth].forward_infer(&cur)?;
        lengths.push(cur.len());
        for d in 0..depth {
            let level = depth - d;
            let v = ops::concat_channels(&cur, &skips[level - 1])?;
            cur = self.blocks[depth + 1 + d].forward_infer(&v)?;
            lengths.push(cur.len());
        }
        cur = self.blocks[2 * depth + 1].forward_infer(&cur)?;
        lengths.push(cur.len());
        Ok((cur, lengths))
    }

    /// Trainable parameter buffers in a fixed order (per block, per layer:
    /// weight, bias or gamma, beta). Counts as a mutation: caches taken
    /// before this call are stale.
    pub fn params_mut(&mut self) -> Vec<&mut [T]> {
        self.version += 1;
        let mut out = Vec::new();
        for block in &mut self.blocks {
            for layer in &mut block.layers {
                match layer {
                    Layer::Conv { params, .. } | Layer::ConvTranspose { params, .. } => {
                        out.push(params.weight.as_mut_slice());
                        out.push(params.bias.as_mut_slice());
                    }
                    Layer::BatchNorm(p) => {
                        out.push(p.gamma.as_mut_slice());
                        out.push(p.beta.as_mut_slice());
                    }
                    Layer::Relu | Layer::MaxPool => {}
                }
            }
        }
        out
    }

    pub fn params(&self) -> Vec<&[T]> {
        let mut out = Vec::new();
        for block in &self.blocks {
            for layer in &block.layers {
                match layer {
                    Layer::Conv { params, .. } | Layer::ConvTranspose { params, .. } => {
                        out.push(params.weight.as_slice());
                        out.push(params.bias.as_slice());
                    }
                    Layer::BatchNorm(p) => {
                        out.push(p.gamma.as_slice());
                        out.push(p.beta.as_slice());
                    }
                    Layer::Relu | Layer::MaxPool => {}
                }
            }
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    /// Every buffer (trainable and running statistics) with a stable name.
    pub fn named_tensors(&self) -> Vec<NamedTensor<'_, T>> {
        let mut out = Vec::new();
        for block in &self.blocks {
            let bname = block.layout.name();
            for (i, layer) in block.layers.iter().enumerate() {
                match layer {
                    Layer::Conv { spec, params } | Layer::ConvTranspose { spec, params } => {
                        let shape = match layer {
                            Layer::Conv { .. } => {
                                vec![spec.out_channels(), spec.in_channels(), spec.kernel_size()]
                            }
                            _ => vec![spec.in_channels(), spec.out_channels(), spec.kernel_size()],
                        };
                        out.push(NamedTensor {
                            name: format!("{bname}.{i}.weight"),
                            shape,
                            data: &params.weight,
                        });
                        out.push(NamedTensor {
                            name: format!("{bname}.{i}.bias"),
                            shape: vec![params.bias.len()],
                            data: &params.bias,
                        });
                    }
                    Layer::BatchNorm(p) => {
                        let c = p.channels();
                        for (suffix, data) in [
                            ("gamma", &p.gamma),
                            ("beta", &p.beta),
                            ("running_mean", &p.running_mean),
                            ("running_var", &p.running_var),
                        ] {
                            out.push(NamedTensor {
                                name: format!("{bname}.{i}.{suffix}"),
                                shape: vec![c],
                                data,
                            });
                        }
                    }
                    Layer::Relu | Layer::MaxPool => {}
                }
            }
        }
        out
    }

    /// Overwrites the named buffer. Fails without modifying anything if the
    /// name is unknown, the length differs, or a running variance is not
    /// strictly positive.
    pub fn set_tensor(&mut self, name: &str, values: &[T]) -> Result<()> {
        let (bname, rest) = name
            .split_once('.')
            .ok_or_else(|| Error::Data(format!("malformed tensor name {name:?}")))?;
        let (idx, field) = rest
            .split_once('.')
            .ok_or_else(|| Error::Data(format!("malformed tensor name {name:?}")))?;
        let idx: usize = idx
            .parse()
            .map_err(|_| Error::Data(format!("malformed tensor name {name:?}")))?;
        let block = self
            .blocks
            .iter_mut()
            .find(|b| b.layout.name() == bname)
            .ok_or_else(|| Error::Data(format!("unknown block in tensor {name:?}")))?;
        let layer = block
            .layers
            .get_mut(idx)
            .ok_or_else(|| Error::Data(format!("unknown layer in tensor {name:?}")))?;
        let target: &mut Vec<T> = match (layer, field) {
            (Layer::Conv { params, .. } | Layer::ConvTranspose { params, .. }, "weight") => &mut params.weight,
            (Layer::Conv { params, .. } | Layer::ConvTranspose { params, .. }, "bias") => &mut params.bias,
            (Layer::BatchNorm(p), "gamma") => &mut p.gamma,
            (Layer::BatchNorm(p), "beta") => &mut p.beta,
            (Layer::BatchNorm(p), "running_mean") => &mut p.running_mean,
            (Layer::BatchNorm(p), "running_var") => {
                if values.iter().any(|v| !(*v > T::zero())) {
                    return Err(Error::Data(format!("{name}: running variance must be positive")));
                }
                &mut p.running_var
            }
            _ => return Err(Error::Data(format!("unknown tensor {name:?}"))),
        };
        if target.len() != values.len() {
            return Err(Error::Data(format!(
                "{name}: expected {} values, got {}",
                target.len(),
                values.len()
            )));
        }
        target.copy_from_slice(values);
        self.version += 1;
        Ok(())
    }

    /// Number of named buffers; a complete checkpoint sets all of them.
    pub fn tensor_count(&self) -> usize {
        self.named_tensors().len()
    }

    /// Converts parameters to another precision.
    pub fn cast<U: Scalar>(&self) -> Model<U> {
        let conv = |p: &ConvParams<T>| ConvParams {
            weight: p.weight.iter().map(|v| U::lit(v.as_f64())).collect(),
            bias: p.bias.iter().map(|v| U::lit(v.as_f64())).collect(),
        };
        let vecc = |v: &Vec<T>| v.iter().map(|x| U::lit(x.as_f64())).collect::<Vec<U>>();
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block {
                layout: b.layout.clone(),
                layers: b
                    .layers
                    .iter()
                    .map(|l| match l {
                        Layer::Conv { spec, params } => Layer::Conv {
                            spec: *spec,
                            params: conv(params),
                        },
                        Layer::ConvTranspose { spec, params } => Layer::ConvTranspose {
                            spec: *spec,
                            params: conv(params),
                        },
                        Layer::BatchNorm(p) => Layer::BatchNorm(BatchNormParams {
                            gamma: vecc(&p.gamma),
                            beta: vecc(&p.beta),
                            running_mean: vecc(&p.running_mean),
                            running_var: vecc(&p.running_var),
                        }),
                        Layer::Relu => Layer::Relu,
                        Layer::MaxPool => Layer::MaxPool,
                    })
                    .collect(),
            })
            .collect();
        Model {
            config: self.config,
            seed: self.seed,
            layout: self.layout.clone(),
            blocks,
            version: 0,
        }
    }

    /// Index of the block with the given kind.
    pub fn block_index(&self, kind: BlockKind) -> Option<usize> {
        self.blocks.iter().position(|b| b.layout.kind == kind)
    }
}

impl<T: Scalar> ForwardCache<T> {
    /// Hash of every ReLU sign pattern and max-pool argmax in the pass. Two
    /// passes with equal signatures lie in the same linear region of every
    /// non-smooth layer.
    pub fn activation_signature(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut mix = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x0100_0000_01b3);
        };
        for block in &self.blocks {
            for c in block {
                match c {
                    LayerCache::Pool(ps) => {
                        for p in ps {
                            for &a in &p.argmax {
                                mix(a as u64);
                            }
                        }
                    }
                    LayerCache::Relu(xs) => {
                        for x in xs {
                            for v in x.data() {
                                mix((*v > T::zero()) as u64);
                            }
                        }
                    }
                    LayerCache::Input(_) | LayerCache::BatchNorm { .. } => {}
                }
            }
        }
        h
    }
}
