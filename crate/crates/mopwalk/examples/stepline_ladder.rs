//! Walks the step-line ladder for a few compositions and prints the multi-index at each position.

use mopwalk::stepline::{decompose, index_of, jp_multiindex, Composition};

fn main() -> mopwalk::Result<()> {
    let two = Composition::step_line();
    println!("two weights, composition (1, 1)");
    for i in 0..8 {
        let d = decompose(i, &two);
        println!("  i = {i}: weight {} degree {} -> nu = {:?}, linear form index {:?}", d.a, d.k, d.nu, jp_multiindex(i));
    }

    let comp = Composition::new(vec![2, 1, 3])?;
    println!("composition (2, 1, 3)");
    for i in 0..12 {
        let d = decompose(i, &comp);
        assert_eq!(index_of(d.k, d.a, &comp), i);
        println!("  i = {i:2}: q = {}, a = {}, r = {}, nu = {:?}", d.q, d.a, d.r, d.nu);
    }
    Ok(())
}
