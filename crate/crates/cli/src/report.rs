//! Full analysis of one channel, rendered as JSON or Markdown.

use std::fmt::Write;

use dqms::channel::Channel;
use dqms::indices::{c_index_with, ce_index_with, classical_predicates, q_index_with, w_index_with, IndexResult};
use dqms::linalg::Config;
use dqms::opsys::{chain, op_system};
use dqms::spectral::{capacities_of, classify, peripheral_structure, PeripheralEigenvalue};
use dqms::zero_error::{
    capacity_bounds_with, peripheral_code_of, tradeoff_of, verify_zero_error_code, c0_bounds, CapacityBounds,
    Tradeoff,
};
use dqms::Result;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ChannelSummary {
    pub dim: usize,
    pub kind: &'static str,
    pub kraus_rank: usize,
    pub unital: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationSummary {
    pub ergodic: bool,
    pub irreducible: bool,
    pub mixing: bool,
    pub primitive: bool,
    pub aeb: bool,
    pub fixed_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSummary {
    pub d: usize,
    pub m: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeripheralSummary {
    pub eigenvalues: Vec<PeripheralEigenvalue>,
    pub blocks: Vec<BlockSummary>,
    pub period: Option<u64>,
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub dims: Vec<usize>,
    pub n: usize,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexSummary {
    pub c: IndexResult,
    pub q: IndexResult,
    pub c_e: IndexResult,
    pub w: IndexResult,
    pub kraus_span_time: Option<usize>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AsymptoticCapacities {
    pub c0: f64,
    pub q0: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CodeSummary {
    pub size: usize,
    pub horizon: usize,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub channel: ChannelSummary,
    pub classification: ClassificationSummary,
    pub peripheral: PeripheralSummary,
    pub chain: ChainSummary,
    pub indices: IndexSummary,
    pub capacities: CapacityBounds,
    pub asymptotic: AsymptoticCapacities,
    pub peripheral_code: CodeSummary,
    pub tradeoff: Tradeoff,
    pub warnings: Vec<String>,
}

/// `horizon` overrides the code-verification horizon (default three times
/// the period of the block permutation).
pub fn analyze(ch: &Channel, config: &Config, horizon: Option<usize>) -> Result<AnalysisReport> {
    let tol = &config.tol;
    let d = ch.dim();
    let mut warnings = Vec::new();

    let cl = classify(ch, tol)?;
    for z in &cl.ambiguous_eigenvalues {
        warnings.push(format!(
            "eigenvalue {:.9}{:+.9}i lies within the ambiguity band of the unit circle",
            z.re, z.im
        ));
    }
    if let Some(e) = &cl.structure_error {
        warnings.push(format!("AEB decided without block structure: {e}"));
    }
    let ps = peripheral_structure(ch, tol)?;
    if ps.period.is_none() {
        warnings.push("period not resolved: some peripheral angle is not a rational multiple of 2π".into());
    }

    let chain_res = chain(ch, tol)?;
    if !chain_res.consistent {
        warnings.push("operator-system recursion disagrees with the explicit square".into());
    }
    let mixing = match ch.stochastic() {
        Some(a) => {
            let p = classical_predicates(a, tol)?;
            if !p.spectral_agrees {
                warnings.push("spectral and graph tests on A disagree; graph test used".into());
            }
            p.mixing
        }
        None => cl.mixing,
    };
    let c = c_index_with(ch, &cl, Some(&chain_res), config)?;
    let q = q_index_with(ch, &cl, Some(&chain_res), config)?;
    let c_e = ce_index_with(ch, &cl, Some(&chain_res), config)?;
    let w = w_index_with(ch, &cl, config)?;
    for r in [&c, &q, &c_e, &w.index] {
        if !r.certified {
            warnings.push(format!(
                "{} index {} is not certified (heuristic step in the trail)",
                r.name, r.value
            ));
        }
    }
    if c.value.is_finite() != mixing {
        warnings.push("c index finiteness disagrees with mixing".into());
    }
    if q.value.is_finite() != cl.aeb {
        warnings.push("q index finiteness disagrees with asymptotic entanglement breaking".into());
    }

    let s = op_system(ch, tol)?;
    let capacities = capacity_bounds_with(ch, &s, Some(&ps), config)?;
    if !capacities.c0.exact {
        warnings.push("C0 is bracketed, not determined".into());
    }
    if !capacities.q0.exact {
        warnings.push("Q0 is bracketed, not determined".into());
    }
    let (c_inf, q_inf) = capacities_of(&ps);

    let code = peripheral_code_of(&ps);
    let code_horizon = horizon.unwrap_or(code.horizon);
    let verified = verify_zero_error_code(ch, &code.states, code_horizon, tol)?;
    if !verified {
        warnings.push("peripheral code failed verification".into());
    }

    let comp_c0 = c0_bounds(&ch.complementary()?, config)?.lo;
    let tradeoff = tradeoff_of(d, comp_c0, capacities.q0.lo);
    if !tradeoff.holds {
        warnings.push("capacity trade-off inequality violated".into());
    }

    Ok(AnalysisReport {
        channel: ChannelSummary {
            dim: d,
            kind: ch.kind().name(),
            kraus_rank: ch.kraus_rank(),
            unital: ch.is_unital(tol),
        },
        classification: ClassificationSummary {
            ergodic: cl.ergodic,
            irreducible: cl.irreducible,
            mixing: cl.mixing,
            primitive: cl.primitive,
            aeb: cl.aeb,
            fixed_dim: cl.fixed_dim,
        },
        peripheral: PeripheralSummary {
            eigenvalues: ps.eigenvalues.clone(),
            blocks: ps.blocks.iter().map(|&(d, m)| BlockSummary { d, m }).collect(),
            period: ps.period,
            permutation: ps.permutation.clone(),
        },
        chain: ChainSummary {
            dims: chain_res.dims.clone(),
            n: chain_res.n,
            consistent: chain_res.consistent,
        },
        indices: IndexSummary {
            c,
            q,
            c_e,
            w: w.index,
            kraus_span_time: w.kraus_span_time,
        },
        capacities,
        asymptotic: AsymptoticCapacities { c0: c_inf, q0: q_inf },
        peripheral_code: CodeSummary {
            size: code.states.len(),
            horizon: code_horizon,
            verified,
        },
        tradeoff,
        warnings,
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let ch = &self.channel;
        let _ = writeln!(out, "# Channel analysis\n");
        let _ = writeln!(
            out,
            "- dim: {}\n- kind: {}\n- kraus_rank: {}\n- unital: {}\n",
            ch.dim, ch.kind, ch.kraus_rank, ch.unital
        );

        let c = &self.classification;
        let _ = writeln!(out, "## Classification\n");
        let _ = writeln!(out, "| property | value |\n|---|---|");
        for (k, v) in [
            ("ergodic", c.ergodic),
            ("irreducible", c.irreducible),
            ("mixing", c.mixing),
            ("primitive", c.primitive),
            ("aeb", c.aeb),
        ] {
            let _ = writeln!(out, "| {k} | {v} |");
        }
        let _ = writeln!(out, "| fixed_dim | {} |\n", c.fixed_dim);

        let p = &self.peripheral;
        let _ = writeln!(out, "## Peripheral structure\n");
        let eig: Vec<String> = p
            .eigenvalues
            .iter()
            .map(|e| format!("{}{:+}i (×{})", e.re, e.im, e.multiplicity))
            .collect();
        let _ = writeln!(out, "- eigenvalues: {}", eig.join(", "));
        let blocks: Vec<String> = p.blocks.iter().map(|b| format!("(d={}, m={})", b.d, b.m)).collect();
        let _ = writeln!(out, "- blocks: {}", blocks.join(", "));
        let _ = writeln!(
            out,
            "- period: {}",
            p.period.map_or("not resolved".to_string(), |q| q.to_string())
        );
        let _ = writeln!(out, "- permutation: {:?}\n", p.permutation);

        let _ = writeln!(out, "## Operator-system chain\n");
        let _ = writeln!(
            out,
            "- dims: {:?}\n- N: {}\n- consistent: {}\n",
            self.chain.dims, self.chain.n, self.chain.consistent
        );

        let _ = writeln!(out, "## Indices\n");
        let _ = writeln!(out, "| index | value | certified | bound used | note |\n|---|---|---|---|---|");
        let i = &self.indices;
        for r in [&i.c, &i.q, &i.c_e, &i.w] {
            let cert = if r.certified { "yes" } else { "no (not certified)" };
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} |",
                r.name,
                r.value,
                cert,
                r.bound_used,
                r.justification.as_deref().unwrap_or("")
            );
        }
        let _ = writeln!(
            out,
            "\n- kraus_span_time: {}\n",
            i.kraus_span_time.map_or("n/a".to_string(), |n| n.to_string())
        );

        let cap = &self.capacities;
        let _ = writeln!(out, "## Zero-error capacities\n");
        let _ = writeln!(out, "| capacity | lo | hi | exact |\n|---|---|---|---|");
        let _ = writeln!(out, "| C0 | {} | {} | {} |", cap.c0.lo, cap.c0.hi, cap.c0.exact);
        let _ = writeln!(out, "| Q0 | {} | {} | {} |", cap.q0.lo, cap.q0.hi, cap.q0.exact);
        let _ = writeln!(out, "\n- c0e_zero: {}", cap.c0e_zero);
        let _ = writeln!(
            out,
            "- asymptotic: c0 = {}, q0 = {}",
            self.asymptotic.c0, self.asymptotic.q0
        );
        let code = &self.peripheral_code;
        let _ = writeln!(
            out,
            "- peripheral code: size {}, horizon {}, verified {}",
            code.size, code.horizon, code.verified
        );
        let t = &self.tradeoff;
        let _ = writeln!(
            out,
            "- trade-off: {} + {} = {} ≤ {} (slack {}, holds {})\n",
            t.c0_complement_lo.exp2(),
            t.q0_lo.exp2(),
            t.lhs,
            t.rhs,
            t.slack,
            t.holds
        );

        let _ = writeln!(out, "## Warnings\n");
        if self.warnings.is_empty() {
            let _ = writeln!(out, "none");
        }
        for w in &self.warnings {
            let _ = writeln!(out, "- {w}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dqms::generators::m3;
    use dqms::indices::IndexValue;

    #[test]
    fn m3_report() {
        let r = analyze(&m3(), &Config::default(), None).unwrap();
        assert_eq!(r.chain.dims, vec![3, 5, 9]);
        assert_eq!(r.indices.c.value, IndexValue::Finite(3));
        assert_eq!(r.indices.q.value, IndexValue::Finite(1));
        assert!(r.peripheral_code.verified);
        assert!(r.tradeoff.holds);
        let md = r.to_markdown();
        assert!(md.contains("| c | 3 | yes"));
    }
}
