//! The worked-example regression bundle: for each dimension in a range,
//! the self-tensor Euler characteristic of the rank-n block computed two
//! ways, the dual-cokernel dimension of the rank-n degree-minus-one
//! family (symbolic lower bound plus a sampled exact value), and the
//! verdict pair for the two threshold sheaves.

use crate::render::Format;
use crate::{CmdError, RunOutput};
use linmonad::chern::{chi_of_kclass, chi_tensor_display_chain, kclass_of_monad};
use linmonad::lab::{random_monad, PrimeField};
use linmonad::monads::MonadSpec;
use linmonad::stability::{sharpness_block, sharpness_pair, Certificate};
use linmonad::varieties::Variety;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Prime used for the sampled dual-cokernel dimensions.
const SAMPLE_PRIME: u64 = 10007;

/// Fixture shipped with the binary; `--fixture` overrides it.
const DEFAULT_FIXTURE: &str = include_str!("../fixtures/regression.json");

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ExampleRow {
    pub n: u32,
    /// (a, b, c) of the positive-degree block F.
    pub block: (u32, u32, u32),
    /// chi(F tensor F) through the display sequences.
    pub chi_self_tensor_chain: i64,
    /// The same number from squaring the K-class.
    pub chi_self_tensor_square: i64,
    pub degree_zero_rank: i64,
    pub degree_zero_status: String,
    /// Slope of the destabilizing summand of the degree-zero case.
    pub destabilizer_slope: String,
    pub nonzero_rank: i64,
    pub nonzero_status: String,
    /// (a, b, c) of the rank-n degree-minus-one quotient family.
    pub quotient_family: (u32, u32, u32),
    pub h1_dual_lower_bound: i64,
    /// Exact dual-cokernel dimension of one sampled member.
    pub h1_dual_sampled: u64,
    pub sample_seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Bundle {
    pub version: u32,
    /// How each column is computed, keyed by column name.
    pub routes: Vec<(String, String)>,
    pub sample_field: String,
    pub rows: Vec<ExampleRow>,
}

fn routes() -> Vec<(String, String)> {
    [
        ("chi_self_tensor_chain", "display-sequence chi chain"),
        ("chi_self_tensor_square", "K-class square"),
        ("degree_zero_status", "verdict on block + dual block"),
        ("nonzero_status", "verdict on extension by the trivial sheaf"),
        ("h1_dual_lower_bound", "section count a(n+1) - b"),
        (
            "h1_dual_sampled",
            "dual cokernel of one seeded draw of the left map",
        ),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

pub fn build_row(n: u32, seed: u64) -> Result<ExampleRow, CmdError> {
    let v = Variety::projective(n).map_err(|e| CmdError::Internal(e.to_string()))?;
    let block = sharpness_block(n);
    let chain = chi_tensor_display_chain(&block, &v)
        .map_err(|e| CmdError::Internal(e.to_string()))?;
    let kf = kclass_of_monad(&block, &v);
    let square = chi_of_kclass(&kf.tensor(&kf), &v)
        .map_err(|e| CmdError::Internal(e.to_string()))?;

    let report = sharpness_pair(n).map_err(|e| CmdError::Internal(e.to_string()))?;
    let dz = &report.degree_zero_case;
    let slope = dz
        .verdict
        .certificates
        .iter()
        .find_map(|c| match c {
            Certificate::SubobjectWitness {
                sub_rank, sub_c1, ..
            } => Some(
                linmonad::chern::slope(*sub_c1, *sub_rank, &v).to_string(),
            ),
            _ => None,
        })
        .unwrap_or_else(|| "none".into());
    let nz = &report.nonzero_degree_case;

    // The dual cokernel is a function of the left map alone, so the
    // sample draws just that map from the quotient family's shape; the
    // full monad with its right map is not needed for this count.
    let g = MonadSpec::twist_monad(4, n + 9, 5);
    let fp = PrimeField::new(SAMPLE_PRIME).map_err(|e| CmdError::Internal(e.to_string()))?;
    let sample = random_monad(&fp, n, g.a, g.b, 0, seed)
        .map_err(|e| CmdError::Internal(e.to_string()))?;
    let sampled = sample.h1_dual_coker();

    Ok(ExampleRow {
        n,
        block: (block.a, block.b, block.c),
        chi_self_tensor_chain: chain,
        chi_self_tensor_square: square,
        degree_zero_rank: dz.verdict.rank,
        degree_zero_status: format!("{:?}", dz.verdict.status),
        destabilizer_slope: slope,
        nonzero_rank: nz.verdict.rank,
        nonzero_status: format!("{:?}", nz.verdict.status),
        quotient_family: (g.a, g.b, g.c),
        h1_dual_lower_bound: nz.h1_dual_bound.unwrap_or(0),
        h1_dual_sampled: sampled,
        sample_seed: seed,
    })
}

pub fn build_bundle(min_n: u32, max_n: u32, seed: u64) -> Result<Bundle, CmdError> {
    let mut rows = Vec::new();
    for n in min_n..=max_n {
        rows.push(build_row(n, seed + n as u64)?);
    }
    Ok(Bundle {
        version: 1,
        routes: routes(),
        sample_field: format!("F_{SAMPLE_PRIME}"),
        rows,
    })
}

fn render_bundle(fmt: Format, bundle: &Bundle) -> String {
    match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(bundle).unwrap();
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from(
                "n,chi_chain,chi_square,degree_zero_rank,degree_zero_status,\
                 destabilizer_slope,nonzero_rank,nonzero_status,h1_lower,h1_sampled\n",
            );
            for r in &bundle.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{}\n",
                    r.n,
                    r.chi_self_tensor_chain,
                    r.chi_self_tensor_square,
                    r.degree_zero_rank,
                    r.degree_zero_status,
                    r.destabilizer_slope,
                    r.nonzero_rank,
                    r.nonzero_status,
                    r.h1_dual_lower_bound,
                    r.h1_dual_sampled
                ));
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for r in &bundle.rows {
                out.push_str(&format!(
                    "n={}: block ({},{},{}), chi(FxF) = {} = {}; rank-{} sum {} \
                     (destabilizer slope {}); rank-{} extension {}; h1 of the dual >= {} \
                     (sampled {} over {})\n",
                    r.n,
                    r.block.0,
                    r.block.1,
                    r.block.2,
                    r.chi_self_tensor_chain,
                    r.chi_self_tensor_square,
                    r.degree_zero_rank,
                    r.degree_zero_status,
                    r.destabilizer_slope,
                    r.nonzero_rank,
                    r.nonzero_status,
                    r.h1_dual_lower_bound,
                    r.h1_dual_sampled,
                    bundle.sample_field
                ));
            }
            if bundle.rows.is_empty() {
                out.push_str("empty range, nothing to check\n");
            }
            out
        }
    }
}

/// Field-by-field fixture comparison; every difference becomes one line.
fn diff_bundles(expected: &Bundle, got: &Bundle) -> Vec<String> {
    let mut diffs = Vec::new();
    if expected.version != got.version {
        diffs.push(format!(
            "version: fixture {} vs computed {}",
            expected.version, got.version
        ));
    }
    let exp: std::collections::BTreeMap<u32, &ExampleRow> =
        expected.rows.iter().map(|r| (r.n, r)).collect();
    let gotm: std::collections::BTreeMap<u32, &ExampleRow> =
        got.rows.iter().map(|r| (r.n, r)).collect();
    for (n, e) in &exp {
        match gotm.get(n) {
            None => diffs.push(format!("n={n}: fixture row has no computed partner")),
            Some(g) if **g != **e => {
                let ev = serde_json::to_value(e).unwrap();
                let gv = serde_json::to_value(g).unwrap();
                if let (Some(eo), Some(go)) = (ev.as_object(), gv.as_object()) {
                    for (k, eval) in eo {
                        if go.get(k) != Some(eval) {
                            diffs.push(format!(
                                "n={n} {k}: fixture {} vs computed {}",
                                eval,
                                go.get(k).unwrap_or(&serde_json::Value::Null)
                            ));
                        }
                    }
                }
            }
            _ => {}
        }
    }
    for n in gotm.keys() {
        if !exp.contains_key(n) {
            diffs.push(format!("n={n}: computed row has no fixture partner"));
        }
    }
    diffs
}

pub struct ExamplesRequest {
    pub min_n: u32,
    pub max_n: u32,
    pub seed: u64,
    pub fixture: Option<PathBuf>,
    pub emit_fixture: bool,
    pub fmt: Format,
}

pub fn run_examples(req: &ExamplesRequest) -> Result<RunOutput, CmdError> {
    if req.min_n > req.max_n {
        return Ok(RunOutput {
            code: 0,
            stdout: render_bundle(req.fmt, &Bundle {
                version: 1,
                routes: routes(),
                sample_field: format!("F_{SAMPLE_PRIME}"),
                rows: Vec::new(),
            }),
            stderr: String::new(),
        });
    }
    if req.min_n < 2 {
        return Err(CmdError::Input("dimension range starts below 2".into()));
    }
    let bundle = build_bundle(req.min_n, req.max_n, req.seed)?;
    if req.emit_fixture {
        let mut s = serde_json::to_string_pretty(&bundle).unwrap();
        s.push('\n');
        return Ok(RunOutput {
            code: 0,
            stdout: s,
            stderr: String::new(),
        });
    }

    let fixture_text = match &req.fixture {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))?,
        None => DEFAULT_FIXTURE.to_string(),
    };
    let fixture: Bundle = serde_json::from_str(&fixture_text)
        .map_err(|e| CmdError::Input(format!("bad fixture: {e}")))?;
    let relevant = Bundle {
        rows: fixture
            .rows
            .iter()
            .filter(|r| r.n >= req.min_n && r.n <= req.max_n)
            .cloned()
            .collect(),
        ..fixture
    };

    let diffs = diff_bundles(&relevant, &bundle);
    let stdout = render_bundle(req.fmt, &bundle);
    if diffs.is_empty() {
        Ok(RunOutput {
            code: 0,
            stdout,
            stderr: String::new(),
        })
    } else {
        let mut stderr = String::from("regression mismatch:\n");
        for d in &diffs {
            stderr.push_str(&format!("  {d}\n"));
        }
        Ok(RunOutput {
            code: crate::EXIT_REGRESSION,
            stdout,
            stderr,
        })
    }
}
