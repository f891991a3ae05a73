//! Flat `key = value` scenario files.
//!
//! ```text
//! # jam release with the linear kernel
//! scenario = my-run
//! base = fig1-lin          # optional: start from a preset
//! solver = macro           # macro | micro
//! velocity.kind = linear
//! velocity.v_free = 1
//! velocity.rho_max = 1
//! kernel.kind = linear     # constant | linear | concave
//! eta = 1
//! vbar = 0.5
//! b = 0
//! grid.dx = 0.005
//! grid.t_end = 20
//! grid.cfl = 1
//! grid.x_left = auto       # number or auto
//! grid.x_right = auto
//! init.segments = (0, 1), (inf, 0.5)
//! output.cadence = 0.1
//! output.snapshots = false
//! output.trajectory = false
//! micro.h = 0.01
//! ```
//!
//! Unset keys keep the values of `base` (or of `fig1-const`). Unknown keys
//! are rejected.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Kernel, KernelKind, VelocityKind, VelocityModel};
use crate::scenario::{InitialProfile, ScenarioConfig, SolverKind};

pub const KEYS: [&str; 20] = [
    "scenario",
    "base",
    "solver",
    "velocity.kind",
    "velocity.v_free",
    "velocity.rho_max",
    "kernel.kind",
    "eta",
    "vbar",
    "b",
    "grid.dx",
    "grid.t_end",
    "grid.cfl",
    "grid.x_left",
    "grid.x_right",
    "init.segments",
    "output.cadence",
    "output.snapshots",
    "output.trajectory",
    "micro.h",
];

/// Ordered `key -> (value, line)` pairs with duplicates rejected.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, (String, usize)>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `key = value`, found `{line}`"),
            });
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("unknown key `{key}`"),
            });
        }
        if map
            .insert(key.to_string(), (value.trim().to_string(), line_no))
            .is_some()
        {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("duplicate key `{key}`"),
            });
        }
    }
    Ok(map)
}

fn number(value: &str, line: usize) -> Result<f64> {
    let v = value.trim();
    let parsed = match v.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
        _ => v.parse::<f64>(),
    };
    parsed.map_err(|_| Error::Parse {
        line,
        msg: format!("`{v}` is not a number"),
    })
}

fn boolean(value: &str, line: usize) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::Parse {
            line,
            msg: format!("`{other}` is not a boolean"),
        }),
    }
}

fn optional_number(value: &str, line: usize) -> Result<Option<f64>> {
    if value.trim().eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        number(value, line).map(Some)
    }
}

/// Parses `(x_upper, value), (x_upper, value), ...`.
pub fn parse_segments(value: &str, line: usize) -> Result<InitialProfile> {
    let mut segments = Vec::new();
    let mut rest = value.trim();
    while !rest.is_empty() {
        let open = rest.strip_prefix('(').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected `(` in segment list near `{rest}`"),
        })?;
        let close = open.find(')').ok_or_else(|| Error::Parse {
            line,
            msg: "unclosed `(` in segment list".into(),
        })?;
        let inner = &open[..close];
        let (a, b) = inner.split_once(',').ok_or_else(|| Error::Parse {
            line,
            msg: format!("segment `({inner})` needs two numbers"),
        })?;
        segments.push((number(a, line)?, number(b, line)?));
        rest = open[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
        }
    }
    InitialProfile::new(segments).map_err(|e| Error::Parse {
        line,
        msg: e.to_string(),
    })
}

/// Builds a config from file text. Validation of the modelling assumptions
/// is left to [`ScenarioConfig::validate`]; [`load_config`] does both.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let pairs = parse_pairs(text)?;
    let get = |k: &str| pairs.get(k).map(|(v, l)| (v.as_str(), *l));

    let mut cfg = match get("base") {
        Some((name, line)) => ScenarioConfig::preset(name).map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?,
        None => ScenarioConfig::preset("fig1-const")?,
    };
    cfg.name = get("scenario")
        .map(|(v, _)| v.to_string())
        .unwrap_or_else(|| "custom".into());

    if let Some((v, line)) = get("solver") {
        cfg.solver = match v {
            "macro" => SolverKind::Macro,
            "micro" => SolverKind::Micro,
            other => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unknown solver `{other}` (expected macro or micro)"),
                })
            }
        };
    }

    if let Some((v, line)) = get("velocity.kind") {
        if v != "linear" {
            return Err(Error::Parse {
                line,
                msg: format!("velocity.kind `{v}` is not available from files (only linear)"),
            });
        }
    }
    let v_free = match get("velocity.v_free") {
        Some((v, l)) => number(v, l)?,
        None => cfg.velocity.v_free().unwrap_or(1.0),
    };
    let rho_max = match get("velocity.rho_max") {
        Some((v, l)) => number(v, l)?,
        None => cfg.velocity.rho_max(),
    };
    if get("velocity.v_free").is_some() || get("velocity.rho_max").is_some() {
        cfg.velocity = VelocityModel::linear(v_free, rho_max)?;
    }

    let kind = match get("kernel.kind") {
        Some((v, line)) => v.parse::<KernelKind>().map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?,
        None => cfg.kernel.kind(),
    };
    let eta = match get("eta") {
        Some((v, l)) => number(v, l)?,
        None => cfg.kernel.eta(),
    };
    cfg.kernel = Kernel::new(kind, eta)?;

    if let Some((v, l)) = get("vbar") {
        cfg.vbar = number(v, l)?;
    }
    if let Some((v, l)) = get("b") {
        cfg.b = number(v, l)?;
    }
    if let Some((v, l)) = get("grid.dx") {
        cfg.grid.dx = number(v, l)?;
    }
    if let Some((v, l)) = get("grid.t_end") {
        cfg.grid.t_end = number(v, l)?;
    }
    if let Some((v, l)) = get("grid.cfl") {
        cfg.grid.cfl = number(v, l)?;
    }
    if let Some((v, l)) = get("grid.x_left") {
        cfg.grid.x_left = optional_number(v, l)?;
    }
    if let Some((v, l)) = get("grid.x_right") {
        cfg.grid.x_right = optional_number(v, l)?;
    }
    if let Some((v, l)) = get("init.segments") {
        cfg.init = parse_segments(v, l)?;
    }
    if let Some((v, l)) = get("output.cadence") {
        cfg.cadence = number(v, l)?;
    }
    if let Some((v, l)) = get("output.snapshots") {
        cfg.snapshots = boolean(v, l)?;
    }
    if let Some((v, l)) = get("output.trajectory") {
        cfg.trajectory = boolean(v, l)?;
    }
    if let Some((v, l)) = get("micro.h") {
        cfg.micro_h = number(v, l)?;
    }
    Ok(cfg)
}

/// Parses and validates.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    let cfg = parse_config(text)?;
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

/// Every key with its resolved value, in file order. Fails for custom speed
/// laws or kernels, which have no file representation.
pub fn resolved_pairs(cfg: &ScenarioConfig) -> Result<Vec<(&'static str, String)>> {
    if cfg.velocity.kind() != VelocityKind::Linear {
        return Err(Error::Unsupported(
            "custom speed laws cannot be written to a config file".into(),
        ));
    }
    if cfg.kernel.kind() == KernelKind::Custom {
        return Err(Error::Unsupported(
            "custom kernels cannot be written to a config file".into(),
        ));
    }
    let segments = cfg
        .init
        .segments()
        .iter()
        .map(|&(u, v)| format!("({}, {})", fmt_num(u), fmt_num(v)))
        .collect::<Vec<_>>()
        .join(", ");
    let opt = |x: Option<f64>| x.map(fmt_num).unwrap_or_else(|| "auto".into());
    Ok(vec![
        ("scenario", cfg.name.clone()),
        ("solver", cfg.solver.as_str().into()),
        ("velocity.kind", "linear".into()),
        (
            "velocity.v_free",
            fmt_num(cfg.velocity.v_free().unwrap_or(f64::NAN)),
        ),
        ("velocity.rho_max", fmt_num(cfg.velocity.rho_max())),
        ("kernel.kind", cfg.kernel.kind().to_string()),
        ("eta", fmt_num(cfg.kernel.eta())),
        ("vbar", fmt_num(cfg.vbar)),
        ("b", fmt_num(cfg.b)),
        ("grid.dx", fmt_num(cfg.grid.dx)),
        ("grid.t_end", fmt_num(cfg.grid.t_end)),
        ("grid.cfl", fmt_num(cfg.grid.cfl)),
        ("grid.x_left", opt(cfg.grid.x_left)),
        ("grid.x_right", opt(cfg.grid.x_right)),
        ("init.segments", segments),
        ("output.cadence", fmt_num(cfg.cadence)),
        ("output.snapshots", cfg.snapshots.to_string()),
        ("output.trajectory", cfg.trajectory.to_string()),
        ("micro.h", fmt_num(cfg.micro_h)),
    ])
}

/// Self-contained config text that reproduces `cfg`.
pub fn to_config_text(cfg: &ScenarioConfig) -> Result<String> {
    let mut out = String::new();
    for (k, v) in resolved_pairs(cfg)? {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    }
    Ok(out)
}
