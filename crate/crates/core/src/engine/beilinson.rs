//! Reading a monad shape off a sheaf through twisted form bundles.
//!
//! On projective space the three dimensions
//!
//! ```text
//! h^1(F(-1) (x) Omega^2(2)),  h^1(F(-1) (x) Omega^1(1)),  h^1(F(-1))
//! ```
//!
//! recover the triple (a, b, c) when F is the cohomology of a monad
//! 0 -> O(-1)^a -> O^b -> O(1)^c -> 0, and the companion rows q != 1 all
//! vanish.  The derivation tensors the display sequences with the form
//! bundles and propagates against the closed-form tables.

use super::{Engine, EngineError, Term};
use crate::monads::{MonadShape, MonadSpec};
use crate::varieties::{h_form_projective, DimRange, Variety};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BeilinsonInput {
    /// A line bundle O(k).
    Line { k: i64 },
    /// Cohomology of a plain monad.
    Monad(MonadSpec),
    /// A direct sum of inputs.
    Sum(Vec<BeilinsonInput>),
}

/// The three h^1 readings, plus whether every companion row vanished.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BeilinsonTriple {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub clean: bool,
}

impl BeilinsonTriple {
    fn add(self, other: BeilinsonTriple) -> BeilinsonTriple {
        BeilinsonTriple {
            a: self.a + other.a,
            b: self.b + other.b,
            c: self.c + other.c,
            clean: self.clean && other.clean,
        }
    }
}

pub fn beilinson_dims(
    input: &BeilinsonInput,
    v: &Variety,
) -> Result<BeilinsonTriple, EngineError> {
    if !v.is_projective_space() {
        return Err(EngineError::BadRequest(
            "form-bundle readings are available on projective space only".into(),
        ));
    }
    match input {
        BeilinsonInput::Line { k } => Ok(line_triple(v.n, *k)),
        BeilinsonInput::Monad(m) => monad_triple(m, v),
        BeilinsonInput::Sum(parts) => {
            let mut acc = BeilinsonTriple {
                a: 0,
                b: 0,
                c: 0,
                clean: true,
            };
            for p in parts {
                acc = acc.add(beilinson_dims(p, v)?);
            }
            Ok(acc)
        }
    }
}

fn line_triple(n: u32, k0: i64) -> BeilinsonTriple {
    // F(-1) (x) Omega^j(j) = Omega^j(j + k0 - 1).
    let mut slots = [0u64; 3];
    let mut clean = true;
    for (idx, j) in [2u32, 1, 0].iter().enumerate() {
        let twist = *j as i64 + k0 - 1;
        for q in 0..=n {
            let h = h_form_projective(n, q, *j, twist);
            if q == 1 {
                slots[idx] = h;
            } else if h != 0 {
                clean = false;
            }
        }
    }
    BeilinsonTriple {
        a: slots[0],
        b: slots[1],
        c: slots[2],
        clean,
    }
}

fn monad_triple(m: &MonadSpec, v: &Variety) -> Result<BeilinsonTriple, EngineError> {
    if m.shape != MonadShape::M1 {
        return Err(EngineError::BadRequest(
            "form-bundle readings handle the plain monad shape only".into(),
        ));
    }
    m.validate(v)
        .map_err(|e| EngineError::BadRequest(e.to_string()))?;
    let n = v.n;
    let mut eng = Engine::new(n, (-5, 5))?;
    let mut slots = [0u64; 3];
    let mut clean = true;
    for (idx, j) in [2u32, 1, 0].iter().enumerate() {
        let j = *j;
        let om = eng.add_oracle_node(&format!("Om{j}"), move |q, t| {
            DimRange::exact(h_form_projective(n, q, j, j as i64 + t))
        });
        let kd = eng.add_node(&format!("K.Om{j}"));
        let ed = eng.add_node(&format!("E.Om{j}"));
        eng.add_ses(
            &format!("ker1.Om{j}"),
            vec![Term::new(kd, 0, 1)],
            vec![Term::new(om, 0, m.b as u64)],
            vec![Term::new(om, 1, m.c as u64)],
        );
        eng.add_ses(
            &format!("ker2.Om{j}"),
            if m.a > 0 {
                vec![Term::new(om, -1, m.a as u64)]
            } else {
                Vec::new()
            },
            vec![Term::new(kd, 0, 1)],
            vec![Term::new(ed, 0, 1)],
        );
        eng.propagate()?;
        for q in 0..=n {
            let cell = eng.range(ed, q, -1);
            if q == 1 {
                match cell.value() {
                    Some(val) => slots[idx] = val,
                    None => {
                        return Err(EngineError::BadRequest(format!(
                            "h1 reading against Omega^{j} not pinned: {cell}"
                        )))
                    }
                }
            } else if !cell.is_zero() {
                clean = false;
            }
        }
    }
    Ok(BeilinsonTriple {
        a: slots[0],
        b: slots[1],
        c: slots[2],
        clean,
    })
}
