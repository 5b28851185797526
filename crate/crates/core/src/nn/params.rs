use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Which network a parameter set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Actor,
    Critic1,
    Critic2,
    TargetActor,
    TargetCritic1,
    TargetCritic2,
}

impl Role {
    pub const ALL: [Role; 6] = [
        Role::Actor,
        Role::Critic1,
        Role::Critic2,
        Role::TargetActor,
        Role::TargetCritic1,
        Role::TargetCritic2,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Role::Actor => "actor",
            Role::Critic1 => "critic1",
            Role::Critic2 => "critic2",
            Role::TargetActor => "target_actor",
            Role::TargetCritic1 => "target_critic1",
            Role::TargetCritic2 => "target_critic2",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Role> {
        Role::ALL.into_iter().find(|r| r.tag() == tag)
    }

    /// The role of the slowly tracking copy of this network.
    pub fn target(self) -> Role {
        match self {
            Role::Actor | Role::TargetActor => Role::TargetActor,
            Role::Critic1 | Role::TargetCritic1 => Role::TargetCritic1,
            Role::Critic2 | Role::TargetCritic2 => Role::TargetCritic2,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Named parameter tensors of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet<T> {
    role: Role,
    tensors: BTreeMap<String, Tensor<T>>,
}

impl<T: Scalar> ParamSet<T> {
    pub fn new(role: Role) -> Self {
        ParamSet {
            role,
            tensors: BTreeMap::new(),
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn insert(&mut self, name: impl Into<String>, t: Tensor<T>) {
        self.tensors.insert(name.into(), t);
    }

    pub fn get(&self, name: &str) -> Option<&Tensor<T>> {
        self.tensors.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor<T>> {
        self.tensors.get_mut(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Tensor<T>)> {
        self.tensors.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (&String, &mut Tensor<T>)> {
        self.tensors.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn num_values(&self) -> usize {
        self.tensors.values().map(Tensor::len).sum()
    }

    /// A copy carrying the target role, as used to seed target networks.
    pub fn target_copy(&self) -> Self {
        ParamSet {
            role: self.role.target(),
            tensors: self.tensors.clone(),
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.role = role;
        self
    }

    /// Errors unless both sets hold the same names with the same shapes.
    pub fn check_same_layout(&self, other: &Self) -> Result<()> {
        if self.tensors.len() != other.tensors.len() {
            return Err(Error::ParamMismatch(format!(
                "{} has {} tensors, {} has {}",
                self.role,
                self.tensors.len(),
                other.role,
                other.tensors.len()
            )));
        }
        for ((a, ta), (b, tb)) in self.tensors.iter().zip(&other.tensors) {
            if a != b {
                return Err(Error::ParamMismatch(format!("`{a}` vs `{b}`")));
            }
            if ta.shape() != tb.shape() {
                return Err(Error::Shape {
                    layer: a.clone(),
                    expected: ta.shape().to_vec(),
                    got: tb.shape().to_vec(),
                });
            }
        }
        Ok(())
    }

    /// Records every tensor on `tape`, as trainable leaves or as constants.
    pub fn bind(&self, tape: &mut Tape<T>, trainable: bool) -> Bound {
        let vars = self
            .tensors
            .iter()
            .map(|(name, t)| {
                let v = if trainable {
                    tape.param(name.clone(), t.clone())
                } else {
                    tape.constant(t.clone())
                };
                (name.clone(), v)
            })
            .collect();
        Bound { vars }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.tensors
            .values()
            .zip(other.tensors.values())
            .flat_map(|(a, b)| a.data().iter().zip(b.data()).map(|(x, y)| (*x - *y).abs()))
            .fold(T::zero(), T::max)
    }
}

/// Tape handles for a bound parameter set.
#[derive(Debug, Clone)]
pub struct Bound {
    vars: BTreeMap<String, Var>,
}

impl Bound {
    pub fn var(&self, name: &str) -> Result<Var> {
        self.vars
            .get(name)
            .copied()
            .ok_or_else(|| Error::ParamMismatch(format!("missing parameter `{name}`")))
    }
}
