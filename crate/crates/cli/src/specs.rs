//! Strategy and tactic arguments.

use std::path::Path;

use rendezvous::format::{parse_strategy, parse_tactic};
use rendezvous::rational::parse_rational;
use rendezvous::zoo::{anderson_weber, uniform_random_strategy, wait_for_mommy_pair, AwConfig};
use rendezvous::{Strategy, Tactic};

use crate::CliError;

pub fn tactic(text: &str, n: usize) -> Result<Tactic, CliError> {
    parse_tactic(text, Some(n)).map_err(|e| CliError::Usage(format!("tactic {text:?}: {e}")))
}

fn need_n(spec: &str, n: Option<usize>) -> Result<usize, CliError> {
    n.ok_or_else(|| CliError::Usage(format!("strategy {spec:?} needs --n")))
}

/// `baby`, `mommy`, `uniform`, `aw:<theta>[:truncated|:multiblock]`, or a
/// strategy file. Multi-block play needs a horizon.
pub fn strategy(spec: &str, n: Option<usize>, horizon: Option<usize>) -> Result<Strategy, CliError> {
    let parsed = match spec {
        "baby" => wait_for_mommy_pair(need_n(spec, n)?).map(|p| p.0),
        "mommy" => wait_for_mommy_pair(need_n(spec, n)?).map(|p| p.1),
        "uniform" => uniform_random_strategy(need_n(spec, n)?),
        _ if spec.starts_with("aw:") => {
            let n = need_n(spec, n)?;
            let mut parts = spec[3..].split(':');
            let theta = parse_rational(parts.next().unwrap_or_default())
                .map_err(|e| CliError::Usage(format!("strategy {spec:?}: {e}")))?;
            let cfg = match parts.next() {
                None | Some("truncated") => AwConfig::truncated(n, theta),
                Some("multiblock") => {
                    let h = horizon
                        .ok_or_else(|| CliError::Usage(format!("strategy {spec:?} needs a horizon")))?;
                    AwConfig::multi_block(n, theta, h)
                }
                Some(other) => return Err(CliError::Usage(format!("unknown block mode {other:?}"))),
            };
            anderson_weber(&cfg)
        }
        _ => {
            let path = Path::new(spec);
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("strategy {spec:?} is neither built in nor readable: {e}")))?;
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
            let s = parse_strategy(&text, name).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
            if let Some(n) = n {
                if n != s.n() {
                    return Err(CliError::Usage(format!("{spec} has n={} but --n is {n}", s.n())));
                }
            }
            Ok(s)
        }
    };
    parsed.map_err(|e| CliError::Usage(format!("strategy {spec:?}: {e}")))
}
