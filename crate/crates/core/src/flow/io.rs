use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::trajectory::{FlowJump, FlowTrajectory};

/// Sidecar metadata for a trajectory file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub zeta: f64,
    pub lambda: Option<f64>,
    pub eta_dist: String,
    pub sigma_p: f64,
    pub rho: f64,
    pub n: u64,
    pub seed: u64,
}

impl TrajectoryMeta {
    pub fn of(traj: &FlowTrajectory) -> Self {
        Self {
            zeta: traj.params.zeta,
            // JSON has no infinity; the instantaneous-sleep limit is `null`.
            lambda: traj.params.lambda.is_finite().then_some(traj.params.lambda),
            eta_dist: traj.eta_dist.kind().to_string(),
            sigma_p: traj.eta_dist.sigma_p2().sqrt(),
            rho: traj.eta_dist.rho(),
            n: traj.n,
            seed: traj.seed,
        }
    }
}

/// Jump list `k,C`.
pub fn write_jump_csv<W: Write>(traj: &FlowTrajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "k,C")?;
    for j in &traj.jumps {
        writeln!(out, "{},{}", j.k, j.value)?;
    }
    Ok(())
}

/// One `k,C` row per step.
pub fn write_dense_csv<W: Write>(traj: &FlowTrajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "k,C")?;
    for (k, v) in traj.dense().iter().enumerate() {
        writeln!(out, "{k},{v}")?;
    }
    Ok(())
}

/// Parse a `k,C` file back into a jump list; dense files collapse to their
/// jumps.
pub fn read_jump_csv<R: BufRead>(input: R) -> io::Result<Vec<FlowJump>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != "k,C" {
        return Err(io::Error::new(
            io::ErrorKind::InvalidData,
            format!("expected header `k,C`, found {header:?}"),
        ));
    }
    let mut jumps = Vec::new();
    let mut prev = 0u64;
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || io::Error::new(io::ErrorKind::InvalidData, format!("bad row {}: {line:?}", i + 2));
        let (k, c) = line.split_once(',').ok_or_else(bad)?;
        let k: u64 = k.trim().parse().map_err(|_| bad())?;
        let c: u64 = c.trim().parse().map_err(|_| bad())?;
        if c < prev {
            return Err(bad());
        }
        if c != prev {
            jumps.push(FlowJump { k, value: c });
            prev = c;
        }
    }
    Ok(jumps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::flow_trajectory;
    use crate::model::{EtaDistribution, ModelParams};

    #[test]
    fn jump_and_dense_files_describe_the_same_trajectory() {
        let params = ModelParams::from_zeta(0.5).unwrap();
        let dist = EtaDistribution::bernoulli(0.5).unwrap();
        let traj = flow_trajectory(300, &params, &dist, 2).unwrap();
        let mut a = Vec::new();
        write_jump_csv(&traj, &mut a).unwrap();
        let mut b = Vec::new();
        write_dense_csv(&traj, &mut b).unwrap();
        assert_eq!(read_jump_csv(&a[..]).unwrap(), traj.jumps);
        assert_eq!(read_jump_csv(&b[..]).unwrap(), traj.jumps);
        assert!(String::from_utf8(a).unwrap().starts_with("k,C\n"));
    }

    #[test]
    fn metadata_fields() {
        let params = ModelParams::from_zeta(0.808).unwrap();
        let dist = EtaDistribution::two_point(20, 0.808).unwrap();
        let traj = flow_trajectory(10, &params, &dist, 5).unwrap();
        let meta = TrajectoryMeta::of(&traj);
        assert_eq!(meta.eta_dist, "twopoint:20");
        assert!((meta.rho - 0.1).abs() < 1e-3);
        let v: serde_json::Value = serde_json::to_value(&meta).unwrap();
        for key in ["zeta", "lambda", "eta_dist", "sigma_p", "rho", "n", "seed"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(read_jump_csv(&b"x,y\n1,2\n"[..]).is_err());
        assert!(read_jump_csv(&b"k,C\n1,2\n2,1\n"[..]).is_err());
        assert!(read_jump_csv(&b"k,C\n1;2\n"[..]).is_err());
        assert_eq!(read_jump_csv(&b"k,C\n"[..]).unwrap(), vec![]);
    }
}
