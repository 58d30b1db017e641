//! Closed-form arithmetic intensities and a simplified ECM runtime estimate
//! for the sparse block operator `Y = A X`.

use std::fmt;

use crate::error::{Error, Result};

/// FLOP per byte of a CSR matrix-vector product.
pub fn ai_spmv() -> f64 {
    0.125
}

/// FLOP per byte of the block product with `k` right-hand sides.
pub fn ai_spbop(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidInput("block width must be at least 1".into()));
    }
    let k = k as f64;
    Ok(k / (4.0 * (k + 1.0)))
}

/// How memory traffic per nonzero is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrafficModel {
    /// `2z + 2kz` doubles: value and index, plus `k` loads of `X` counted twice.
    Ecm,
    /// `z + kz` doubles; with this count `flops / mem_bytes` equals
    /// [`ai_spbop`].
    Minimal,
}

/// Work and traffic of one block product, in FLOP and bytes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelCounts {
    pub flops: f64,
    pub mem_bytes: f64,
    pub reg_bytes: f64,
}

/// Counts for `z` nonzeros and `k` right-hand sides under [`TrafficModel::Ecm`].
pub fn bop_counts(z: usize, k: usize) -> Result<KernelCounts> {
    bop_counts_with(z, k, TrafficModel::Ecm)
}

pub fn bop_counts_with(z: usize, k: usize, model: TrafficModel) -> Result<KernelCounts> {
    if z == 0 || k == 0 {
        return Err(Error::InvalidInput(format!("need z, k >= 1, got z={z}, k={k}")));
    }
    let (z, k) = (z as f64, k as f64);
    let mem_doubles = match model {
        TrafficModel::Ecm => 2.0 * z + 2.0 * k * z,
        TrafficModel::Minimal => z + k * z,
    };
    Ok(KernelCounts {
        flops: 2.0 * k * z,
        mem_bytes: 8.0 * mem_doubles,
        reg_bytes: 8.0 * z * (2.0 + 2.0 * k),
    })
}

/// Peak rates of one core.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Machine {
    /// FLOP/s
    pub peak_flops: f64,
    /// Main-memory bandwidth, B/s
    pub mem_bandwidth: f64,
    /// Register/L1 bandwidth, B/s
    pub reg_bandwidth: f64,
}

impl Machine {
    /// Single core of the reference Xeon used for the published model curves.
    pub fn reference() -> Self {
        Self {
            peak_flops: 38.4e9,
            mem_bandwidth: 6.39e9,
            reg_bandwidth: 286.1e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.peak_flops, self.mem_bandwidth, self.reg_bandwidth] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("machine rates must be positive, got {self:?}")));
            }
        }
        Ok(())
    }
}

/// Which resource limits the kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Binding {
    Comp,
    Mem,
    Reg,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Comp => "comp",
            Self::Mem => "mem",
            Self::Reg => "reg",
        })
    }
}

/// `T = max(T_comp, T_mem, T_reg)` in seconds and the active bound; ties go
/// to the earlier of comp, mem, reg.
pub fn ecm_time(counts: &KernelCounts, machine: &Machine) -> (f64, Binding) {
    let parts = [
        (counts.flops / machine.peak_flops, Binding::Comp),
        (counts.mem_bytes / machine.mem_bandwidth, Binding::Mem),
        (counts.reg_bytes / machine.reg_bandwidth, Binding::Reg),
    ];
    parts
        .into_iter()
        .fold((f64::NEG_INFINITY, Binding::Comp), |best, p| if p.0 > best.0 { p } else { best })
}
