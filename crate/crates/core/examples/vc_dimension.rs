//! Brute-force VC dimensions of the built-in families and of interpretable
//! restrictions of them.

use ermlab::capacity::{shatters, vc_dimension};
use ermlab::{BitVector, HypothesisClass, Predicate};

fn main() -> ermlab::Result<()> {
    let n = 3;
    let conj = HypothesisClass::conjunctions(n)?;
    let classes = [
        HypothesisClass::constants(n)?,
        conj.clone(),
        conj.restrict(Predicate::MaxLiterals { k: 1 }),
        HypothesisClass::trees(n, 1)?,
        HypothesisClass::trees(n, 2)?,
        HypothesisClass::trees(n, 2)?.restrict(Predicate::MaxLiterals { k: 2 }),
        HypothesisClass::dnf3(2)?,
    ];
    for c in &classes {
        let vc = vc_dimension(c, c.domain(), 1 << c.n())?;
        println!("{:<44} |H| = {:>5}  VC = {}{}", c.name(), c.cardinality()?, vc.value, if vc.exact { "" } else { " (lower bound)" });
    }

    let points = [BitVector::from_bools(&[false, true, true]), BitVector::from_bools(&[true, false, true])];
    println!("conjunctions shatter {{011, 101}}: {}", shatters(&conj, &points)?);
    Ok(())
}
