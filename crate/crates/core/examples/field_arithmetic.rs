//! Arithmetic in F_9 = F_3[x]/(m(x)) and a look at a few other orders.

use evasion::field::FieldCtx;

fn main() -> evasion::Result<()> {
    let f = FieldCtx::from_order(9)?;
    println!(
        "{} with modulus {:?} (encoding {})",
        f.order_spelling(),
        f.modulus(),
        f.modulus_encoding()
    );

    print!("    *");
    for b in f.elements() {
        print!("{:>3}", b.0);
    }
    println!();
    for a in f.elements() {
        print!("{:>5}", a.0);
        for b in f.elements() {
            print!("{:>3}", f.mul(a, b).0);
        }
        println!();
    }

    for a in f.elements().skip(1) {
        let inv = f.inv(a);
        assert_eq!(f.mul(a, inv), f.elem(1));
        println!("{}^-1 = {}", a.0, inv.0);
    }

    // the multiplicative group is cyclic: find a generator
    let generator = f
        .elements()
        .skip(1)
        .find(|&g| (1..8).all(|k| f.pow(g, k) != f.elem(1)))
        .expect("F_9^* is cyclic");
    println!("generator of F_9^*: {}", generator.0);

    for q in [8, 16, 25, 27, 49, 64, 81, 121] {
        let g = FieldCtx::from_order(q)?;
        println!("F_{q}: {}", g.to_text());
    }
    match FieldCtx::from_order(12) {
        Ok(_) => unreachable!(),
        Err(e) => println!("F_12: {e}"),
    }
    Ok(())
}
