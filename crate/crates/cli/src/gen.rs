//! Named example channels for `dqms gen`.

use dqms::channel::Channel;
use dqms::generators;
use dqms::io::ChannelSpec;
use dqms::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    Ad(usize),
    M3,
    Firr4,
    Scr5,
    Cycle(usize),
    Random { dim: usize, kraus: usize, seed: u64 },
}

impl Generator {
    pub fn build(&self) -> Result<Channel> {
        match *self {
            Generator::Ad(d) => {
                if d < 3 {
                    return Err(Error::InvalidParams("ad needs d ≥ 3".into()));
                }
                Ok(generators::a_d_channel(d))
            }
            Generator::M3 => Ok(generators::m3()),
            Generator::Firr4 => Ok(generators::firr4()),
            Generator::Scr5 => Ok(generators::scr5()),
            Generator::Cycle(d) => {
                if d == 0 {
                    return Err(Error::InvalidParams("cycle needs d ≥ 1".into()));
                }
                Ok(generators::cycle(d))
            }
            Generator::Random { dim, kraus, seed } => {
                if dim == 0 || kraus == 0 {
                    return Err(Error::InvalidParams("random needs dim ≥ 1 and kraus ≥ 1".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                generators::random_channel(dim, kraus, &mut rng)
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(ChannelSpec::from_channel(&self.build()?).to_json())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dqms::linalg::Tolerances;

    #[test]
    fn every_generator_revalidates() {
        for g in [
            Generator::Ad(4),
            Generator::M3,
            Generator::Firr4,
            Generator::Scr5,
            Generator::Cycle(3),
            Generator::Random { dim: 3, kraus: 4, seed: 7 },
        ] {
            let text = g.to_json().unwrap();
            dqms::io::parse_channel(&text, &Tolerances::default()).unwrap();
        }
    }

    #[test]
    fn random_is_deterministic() {
        let g = Generator::Random { dim: 3, kraus: 4, seed: 7 };
        assert_eq!(g.to_json().unwrap(), g.to_json().unwrap());
    }

    #[test]
    fn ad3_digits() {
        let text = Generator::Ad(3).to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["A"], serde_json::json!([[0.0, 0.5, 0.0], [0.0, 0.0, 1.0], [1.0, 0.5, 0.0]]));
    }
}
