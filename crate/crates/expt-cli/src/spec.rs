//! Text grammars for channels and problem graphs.
//!
//! Channels: `ad:<γ>`, `depol:<p>`, and `<spec>^<k>` for a k-fold tensor
//! power. Graphs: `reg:<n>:<d>:<seed>`, `er:<n>:<p>:<seed>`, `file:<path>`.
//! Keywords are case-insensitive.

use std::path::Path;

use nibp::channels::{amplitude_damping, depolarizing, max_depolarizing_strength, tensor_power};
use nibp::qaoa::{erdos_renyi, random_regular_graph, Graph, UniversalQaoaSpec};
use nibp::rng::stream_rng;
use nibp::Channel;

use crate::error::CliError;

fn bad(token: &str, message: impl Into<String>) -> CliError {
    CliError::Spec {
        token: token.to_string(),
        message: message.into(),
    }
}

fn number<T: std::str::FromStr>(token: &str, what: &str) -> Result<T, CliError> {
    token.trim().parse().map_err(|_| bad(token, format!("expected {what}")))
}

pub fn parse_channel_spec(text: &str) -> Result<Channel, CliError> {
    let text = text.trim();
    if let Some((base, power)) = text.rsplit_once('^') {
        let copies: usize = number(power, "an integer tensor power")?;
        if copies == 0 {
            return Err(bad(power, "tensor power must be at least 1"));
        }
        let single = parse_channel_spec(base)?;
        return tensor_power(&single, copies).map_err(|e| bad(text, e.to_string()));
    }
    let (kind, arg) = text
        .split_once(':')
        .ok_or_else(|| bad(text, "expected `ad:<gamma>` or `depol:<p>`"))?;
    let value: f64 = number(arg, "a number")?;
    match kind.trim().to_ascii_lowercase().as_str() {
        "ad" => {
            if !(0.0..=1.0).contains(&value) {
                return Err(bad(text, "gamma out of [0,1]"));
            }
            amplitude_damping(value).map_err(|e| bad(text, e.to_string()))
        }
        "depol" => {
            let max = max_depolarizing_strength(1);
            if !(0.0..=max).contains(&value) {
                return Err(bad(text, format!("p out of [0,{max}]")));
            }
            depolarizing(value, 1).map_err(|e| bad(text, e.to_string()))
        }
        _ => Err(bad(kind, "unknown channel kind")),
    }
}

pub fn parse_graph_spec(text: &str) -> Result<Graph, CliError> {
    let text = text.trim();
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| bad(text, "expected `reg:`, `er:` or `file:`"))?;
    let kind = kind.to_ascii_lowercase();
    if kind == "file" {
        return Graph::load(Path::new(rest)).map_err(|e| bad(rest, e.to_string()));
    }
    let fields: Vec<&str> = rest.split(':').collect();
    if fields.len() != 3 {
        return Err(bad(text, format!("`{kind}` takes three fields")));
    }
    let n: usize = number(fields[0], "a vertex count")?;
    let seed: u64 = number(fields[2], "an unsigned 64-bit seed")?;
    let mut rng = stream_rng(seed, 0);
    match kind.as_str() {
        "reg" => {
            let d: usize = number(fields[1], "a degree")?;
            // Infeasible degree/size combinations surface as exit code 3.
            Ok(random_regular_graph(n, d, &mut rng)?.with_label(format!("reg-{n}-{d}-{seed}")))
        }
        "er" => {
            let p: f64 = number(fields[1], "an edge probability")?;
            if !(0.0..=1.0).contains(&p) {
                return Err(bad(fields[1], "p out of [0,1]"));
            }
            Ok(erdos_renyi(n, p, &mut rng)?.with_label(format!("er-{n}-{p}-{seed}")))
        }
        _ => Err(bad(&kind, "unknown graph kind")),
    }
}

/// Cost function of a QAOA run: a MaxCut graph or the universal circuit's
/// Hamiltonian on an odd register.
#[derive(Debug, Clone)]
pub enum Problem {
    MaxCut(Graph),
    Universal(UniversalQaoaSpec),
}

impl Problem {
    pub fn n_qubits(&self) -> usize {
        match self {
            Problem::MaxCut(g) => g.n_vertices(),
            Problem::Universal(u) => u.n_qubits,
        }
    }
}

/// The graph grammar plus `universal:<n>`, the reference universal circuit.
pub fn parse_problem_spec(text: &str) -> Result<Problem, CliError> {
    let trimmed = text.trim();
    if let Some((kind, n)) = trimmed.split_once(':') {
        if kind.eq_ignore_ascii_case("universal") {
            let spec = UniversalQaoaSpec::reference(number(n, "a qubit count")?);
            spec.validate().map_err(|e| bad(trimmed, e.to_string()))?;
            return Ok(Problem::Universal(spec));
        }
    }
    parse_graph_spec(trimmed).map(Problem::MaxCut)
}
