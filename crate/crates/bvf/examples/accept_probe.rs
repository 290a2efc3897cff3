fn main() {
    let which: Vec<String> = std::env::args().skip(1).collect();
    let run = |id: &str, f: &dyn Fn() -> bvf::Result<bvf::verify::CriterionResult>| {
        if !which.is_empty() && !which.iter().any(|w| w == id) {
            return;
        }
        let t0 = std::time::Instant::now();
        match f() {
            Ok(r) => println!("{} [{:.1}s]", r.line(), t0.elapsed().as_secs_f64()),
            Err(e) => println!("[ERR] {id}: {e}"),
        }
    };
    run("c1", &bvf::verify::criterion_1);
    run("c2", &bvf::verify::criterion_2);
    run("c3", &bvf::verify::criterion_3);
    run("c4", &bvf::verify::criterion_4);
    run("c5", &bvf::verify::criterion_5);
    run("c6", &|| bvf::verify::criterion_6(20260810));
    run("c7", &bvf::verify::criterion_7);
    run("c8", &|| bvf::verify::criterion_8(20260810));
    run("c9", &|| bvf::verify::criterion_9(20260810));
    run("c10", &|| bvf::verify::criterion_10(20260810));
}
