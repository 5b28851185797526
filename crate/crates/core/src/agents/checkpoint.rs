//! Binary agent checkpoints.
//!
//! Layout (little-endian): the magic bytes, a `u32` format version, the
//! algorithm tag (`u8` length + ASCII), a JSON header block (`u32` length +
//! UTF-8) with hyperparameters, counters and optimizer settings, a `u32`
//! tensor count, then per tensor a `u16` name length, the name, a `u8` rank,
//! `u64` dimensions and row-major `f64` values.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::agent::{Agent, Counters};
use crate::agents::hyper::HyperParams;
use crate::agents::policy::Architecture;
use crate::agents::Algo;
use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::nn::{ParamSet, Role};
use crate::optim::{AdamConfig, AdamState};
use crate::scalar::Scalar;

pub const MAGIC: &[u8; 13] = b"HYDRONAV-CKPT";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    hyper: HyperParams,
    counters: Counters,
    adam: AdamConfig,
    adam_steps: BTreeMap<String, u64>,
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn optimizers<T>(agent: &Agent<T>) -> [(&'static str, &AdamState<T>); 3] {
    [
        ("actor", &agent.actor_opt),
        ("critic1", &agent.critic1_opt),
        ("critic2", &agent.critic2_opt),
    ]
}

fn param_sets<T>(agent: &Agent<T>) -> [&ParamSet<T>; 6] {
    [
        &agent.actor,
        &agent.critic1,
        &agent.critic2,
        &agent.target_actor,
        &agent.target_critic1,
        &agent.target_critic2,
    ]
}

/// Every tensor of the agent under its checkpoint name.
pub fn named_tensors<T: Scalar>(agent: &Agent<T>) -> Vec<(String, Tensor<f64>)> {
    let mut out = Vec::new();
    for set in param_sets(agent) {
        for (name, t) in set.iter() {
            out.push((format!("{}/{name}", set.role().tag()), t.cast()));
        }
    }
    for (net, opt) in optimizers(agent) {
        for (name, t) in &opt.m {
            out.push((format!("adam.{net}.m/{name}"), t.cast()));
        }
        for (name, t) in &opt.v {
            out.push((format!("adam.{net}.v/{name}"), t.cast()));
        }
    }
    out
}

pub fn write_checkpoint<T: Scalar, W: Write>(agent: &Agent<T>, mut w: W) -> Result<()> {
    let io = |e| Error::io("checkpoint stream", e);
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&FORMAT_VERSION.to_le_bytes()).map_err(io)?;
    let tag = agent.algo.tag().as_bytes();
    w.write_all(&[tag.len() as u8]).map_err(io)?;
    w.write_all(tag).map_err(io)?;

    let header = Header {
        hyper: agent.hp.clone(),
        counters: agent.counters,
        adam: agent.actor_opt.config,
        adam_steps: optimizers(agent)
            .iter()
            .map(|(n, o)| (n.to_string(), o.step))
            .collect(),
    };
    let json = serde_json::to_vec(&header)?;
    w.write_all(&(json.len() as u32).to_le_bytes()).map_err(io)?;
    w.write_all(&json).map_err(io)?;

    let tensors = named_tensors(agent);
    w.write_all(&(tensors.len() as u32).to_le_bytes()).map_err(io)?;
    for (name, t) in &tensors {
        let nb = name.as_bytes();
        w.write_all(&(nb.len() as u16).to_le_bytes()).map_err(io)?;
        w.write_all(nb).map_err(io)?;
        w.write_all(&[t.shape().len() as u8]).map_err(io)?;
        for &d in t.shape() {
            w.write_all(&(d as u64).to_le_bytes()).map_err(io)?;
        }
        let mut buf = Vec::with_capacity(8 * t.len());
        for x in t.data() {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf).map_err(io)?;
    }
    w.flush().map_err(io)
}

struct Cursor<R> {
    inner: R,
}

impl<R: Read> Cursor<R> {
    fn bytes(&mut self, n: usize, what: &str) -> Result<Vec<u8>> {
        let mut buf = vec![0u8; n];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| corrupt(format!("truncated while reading {what}")))?;
        Ok(buf)
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner
            .read_exact(&mut buf)
            .map_err(|_| corrupt(format!("truncated while reading {what}")))?;
        Ok(buf)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.array::<1>(what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.array(what)?))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.array(what)?))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.array(what)?))
    }
}

pub fn read_checkpoint<T: Scalar, R: Read>(r: R) -> Result<Agent<T>> {
    let mut c = Cursor { inner: r };
    let magic = c.bytes(MAGIC.len(), "magic")?;
    if magic != MAGIC {
        return Err(corrupt("not a checkpoint file (bad magic)"));
    }
    let version = c.u32("format version")?;
    if version != FORMAT_VERSION {
        return Err(Error::CheckpointVersion(version));
    }
    let tag_len = c.u8("algorithm tag")? as usize;
    let tag = String::from_utf8(c.bytes(tag_len, "algorithm tag")?)
        .map_err(|_| corrupt("algorithm tag is not UTF-8"))?;
    let algo: Algo = tag.parse()?;
    let header_len = c.u32("header length")? as usize;
    let header: Header = serde_json::from_slice(&c.bytes(header_len, "header")?)
        .map_err(|e| corrupt(format!("header: {e}")))?;
    header.hyper.validate()?;

    let count = c.u32("tensor count")?;
    let mut tensors: BTreeMap<String, Tensor<T>> = BTreeMap::new();
    for _ in 0..count {
        let name_len = c.u16("tensor name")? as usize;
        let name = String::from_utf8(c.bytes(name_len, "tensor name")?)
            .map_err(|_| corrupt("tensor name is not UTF-8"))?;
        let rank = c.u8("tensor rank")? as usize;
        if rank > 2 {
            return Err(corrupt(format!("tensor `{name}` has rank {rank}")));
        }
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(c.u64("tensor shape")? as usize);
        }
        let n: usize = shape.iter().product();
        let raw = c.bytes(8 * n, "tensor values")?;
        let data: Vec<T> = raw
            .chunks_exact(8)
            .map(|b| T::of(f64::from_le_bytes(b.try_into().expect("8-byte chunk"))))
            .collect();
        let t = Tensor::new(shape, data)?;
        if tensors.insert(name.clone(), t).is_some() {
            return Err(corrupt(format!("duplicate tensor `{name}`")));
        }
    }
    let mut rest = Vec::new();
    c.inner
        .read_to_end(&mut rest)
        .map_err(|e| Error::io("checkpoint stream", e))?;
    if !rest.is_empty() {
        return Err(corrupt(format!("{} trailing bytes", rest.len())));
    }

    let arch = Architecture::new(algo, header.hyper.hidden);
    let mut take = |prefix: &str| -> BTreeMap<String, Tensor<T>> {
        let p = format!("{prefix}/");
        let keys: Vec<String> = tensors.keys().filter(|k| k.starts_with(&p)).cloned().collect();
        keys.into_iter()
            .map(|k| {
                let t = tensors.remove(&k).expect("key listed");
                (k[p.len()..].to_string(), t)
            })
            .collect()
    };
    let mut set = |role: Role| -> Result<ParamSet<T>> {
        let mut ps = ParamSet::new(role);
        for (k, t) in take(role.tag()) {
            ps.insert(k, t);
        }
        Ok(ps)
    };
    let actor = set(Role::Actor)?;
    let critic1 = set(Role::Critic1)?;
    let critic2 = set(Role::Critic2)?;
    let target_actor = set(Role::TargetActor)?;
    let target_critic1 = set(Role::TargetCritic1)?;
    let target_critic2 = set(Role::TargetCritic2)?;
    for (net, a, b) in [
        (&arch.actor, &actor, &target_actor),
        (&arch.critic1, &critic1, &target_critic1),
        (&arch.critic2, &critic2, &target_critic2),
    ] {
        net.check_params(a)?;
        net.check_params(b)?;
        if a.len() != net.zeros::<T>(a.role()).len() || b.len() != a.len() {
            return Err(corrupt(format!("unexpected extra tensors for `{}`", net.name)));
        }
    }
    let mut opt = |net: &str, params: &ParamSet<T>| -> Result<AdamState<T>> {
        let mut state = AdamState::new(params, header.adam);
        state.step = *header
            .adam_steps
            .get(net)
            .ok_or_else(|| corrupt(format!("missing optimizer step for `{net}`")))?;
        for (slot, moments) in [("m", &mut state.m), ("v", &mut state.v)] {
            let loaded = take(&format!("adam.{net}.{slot}"));
            for (k, t) in moments.iter_mut() {
                let l = loaded
                    .get(k)
                    .ok_or_else(|| corrupt(format!("missing optimizer moment `{net}.{slot}/{k}`")))?;
                if l.shape() != t.shape() {
                    return Err(Error::Shape {
                        layer: k.clone(),
                        expected: t.shape().to_vec(),
                        got: l.shape().to_vec(),
                    });
                }
                *t = l.clone();
            }
            if loaded.len() != moments.len() {
                return Err(corrupt(format!("unexpected optimizer moments for `{net}`")));
            }
        }
        Ok(state)
    };
    let actor_opt = opt("actor", &actor)?;
    let critic1_opt = opt("critic1", &critic1)?;
    let critic2_opt = opt("critic2", &critic2)?;
    if let Some(k) = tensors.keys().next() {
        return Err(corrupt(format!("unknown tensor `{k}`")));
    }
    Ok(Agent {
        algo,
        hp: header.hyper,
        arch,
        actor,
        critic1,
        critic2,
        target_actor,
        target_critic1,
        target_critic2,
        actor_opt,
        critic1_opt,
        critic2_opt,
        counters: header.counters,
    })
}

pub fn save<T: Scalar>(agent: &Agent<T>, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_checkpoint(agent, BufWriter::new(f)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn load<T: Scalar>(path: &Path) -> Result<Agent<T>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_checkpoint(BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small() -> Agent<f64> {
        let hp = HyperParams {
            hidden: 4,
            batch_size: 2,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        Agent::new(Algo::Sto, hp, &mut rng).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let mut agent = small();
        agent.counters.episodes = 17;
        agent.actor_opt.step = 3;
        let mut buf = Vec::new();
        write_checkpoint(&agent, &mut buf).unwrap();
        assert_eq!(&buf[..MAGIC.len()], MAGIC);
        let back: Agent<f64> = read_checkpoint(&buf[..]).unwrap();
        assert_eq!(back, agent);
    }

    #[test]
    fn unknown_version_is_rejected() {
        let mut buf = Vec::new();
        write_checkpoint(&small(), &mut buf).unwrap();
        buf[MAGIC.len()..MAGIC.len() + 4].copy_from_slice(&99u32.to_le_bytes());
        assert!(matches!(read_checkpoint::<f64, _>(&buf[..]), Err(Error::CheckpointVersion(99))));
    }

    #[test]
    fn bad_magic_and_truncation_are_rejected() {
        let mut buf = Vec::new();
        write_checkpoint(&small(), &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_checkpoint::<f64, _>(&bad[..]), Err(Error::Checkpoint(_))));
        assert!(matches!(
            read_checkpoint::<f64, _>(&buf[..buf.len() - 3]),
            Err(Error::Checkpoint(_))
        ));
    }
}
