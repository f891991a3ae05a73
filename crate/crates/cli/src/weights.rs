//! `weights <kernel> <dx> <eta>`: the cell weights as a CSV table.

use std::fmt::Write;

use nlwr_core::{kernel_weights, Kernel, KernelKind};

use crate::error::{CliError, CliResult};

pub fn weights_table(kernel: &str, dx: f64, eta: f64) -> CliResult<String> {
    let kind: KernelKind = kernel
        .parse()
        .map_err(|e: nlwr_core::Error| CliError::validation(e.to_string()))?;
    if kind == KernelKind::Custom {
        return Err(CliError::validation(
            "custom kernels have no closed form to tabulate",
        ));
    }
    let w = kernel_weights(&Kernel::new(kind, eta)?, dx)?;
    let mut out = String::from("k,y_lo,y_hi,gamma\n");
    for (k, g) in w.gamma.iter().enumerate() {
        let _ = writeln!(
            out,
            "{k},{},{},{g}",
            k as f64 * dx,
            ((k + 1) as f64 * dx).min(eta)
        );
    }
    let _ = writeln!(out, "# sum = {}", w.sum());
    if w.tail_mass != 0.0 {
        let _ = writeln!(out, "# mass beyond the last whole cell = {}", w.tail_mass);
    }
    Ok(out)
}
