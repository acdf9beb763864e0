//! Worked examples, each replayed and asserted.

use bifree::base_algebra::{b_one, random_belem, Bimodule, OperatorSpace, PairOfBFaces};
use bifree::bnc_core::{
    collapse, enumerate_bnc, is_bi_noncrossing, is_lateral_refinement, refines, restrict, side_permutation, BncPartition,
    SetPartition, ShadingMap, Side, SideMap,
};
use bifree::lr_diagrams::{enumerate_lr, lr0_to_partition, stratum, two_sums_check};
use bifree::moment_cumulant::{
    cumulant_vanishes_on_b_entry, e_pi, property_iii, property_iv, MomentKind, OperatorTuple,
};
use bifree::operator_model::FreeProduct;
use bifree::suites::{nine_node_check, NINE_NODE_TRACE};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::{Display, Write};
use std::sync::Arc;

type Example = fn(&mut ChaCha8Rng, &mut Checker) -> bifree::Result<()>;

pub const EXAMPLES: [(&str, &str, Example); 13] = [
    ("permutation", "s_χ for χ = llrlr", permutation),
    ("bnc-membership", "{1,3|2,4,5} is bi-non-crossing for llrlr; {1,3|2,4} is not for llll", membership),
    ("catalan", "|BNC(llrlr)| = 42", catalan),
    ("refinement", "{1,3|2|4,5} ≤ {1,3|2,4,5} for llrlr", refinement),
    ("restriction", "the nine-node partition restricted to {6,8}", restriction),
    ("collapse", "{1,3|2} with positions 2 and 3 identified, χ = lll", collapse_example),
    ("lateral", "lateral refinements of {1,2,3} for lll", lateral),
    ("nine-node", "the nine-node E_π: nested expression and value", nine_node),
    ("two-node-choice", "E(T1 L_{E(T2)}) = E(T1 R_{E(T2)}) for χ = ll", two_node_choice),
    ("properties-iii-iv", "properties (iii) and (iv) on the eight-node decompositions", properties),
    ("lr-two-node", "LR diagrams for χ = lr with two shades", lr_two),
    ("lr-three-node", "LR diagrams for χ = rlr, ε = 1,1,2", lr_three),
    ("free-product-basis", "two components with one basis vector each, depth 3", free_product_basis),
];

/// Collects assertion lines.
pub struct Checker {
    lines: Vec<String>,
    ok: bool,
}

impl Checker {
    fn eq<T: PartialEq + Display>(&mut self, what: &str, got: T, want: T) {
        let ok = got == want;
        self.ok &= ok;
        self.lines.push(format!("    {what}: {got}{}", if ok { String::new() } else { format!(" (expected {want})") }));
    }

    fn note(&mut self, line: impl Display) {
        self.lines.push(format!("    {line}"));
    }
}

pub fn run(name: &str, seed: u64, out: &mut String) -> Result<bool, String> {
    if name == "list" {
        for (n, d, _) in EXAMPLES {
            writeln!(out, "{n:<20} {d}").unwrap();
        }
        return Ok(true);
    }
    let chosen: Vec<_> = EXAMPLES.iter().filter(|e| name == "all" || e.0 == name).collect();
    if chosen.is_empty() {
        return Err(format!("unknown example `{name}`; try `examples list`"));
    }
    writeln!(out, "examples seed={seed}").unwrap();
    let mut all_ok = true;
    for (n, d, f) in chosen {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut c = Checker { lines: vec![], ok: true };
        let res = f(&mut rng, &mut c);
        let ok = c.ok && res.is_ok();
        all_ok &= ok;
        writeln!(out, "{n}: {d}").unwrap();
        for l in &c.lines {
            writeln!(out, "{l}").unwrap();
        }
        if let Err(e) = res {
            writeln!(out, "    error: {e}").unwrap();
        }
        writeln!(out, "  {}", if ok { "ok" } else { "FAIL" }).unwrap();
    }
    Ok(all_ok)
}

fn chi(s: &str) -> bifree::Result<SideMap> {
    SideMap::parse(s)
}

fn permutation(_: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let s = side_permutation(&chi("llrlr")?);
    let images: Vec<String> = s.images().iter().map(|x| (x + 1).to_string()).collect();
    c.eq("images", images.join(","), "1,2,4,5,3".into());
    Ok(())
}

fn membership(_: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    c.eq("{1,3|2,4,5} in BNC(llrlr)", is_bi_noncrossing(&SetPartition::parse("1,3|2,4,5")?, &chi("llrlr")?)?, true);
    c.eq("{1,3|2,4} in BNC(llll)", is_bi_noncrossing(&SetPartition::parse("1,3|2,4")?, &chi("llll")?)?, false);
    Ok(())
}

fn catalan(_: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    c.eq("count", enumerate_bnc(&chi("llrlr")?)?.len(), 42);
    Ok(())
}

fn refinement(_: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let x = chi("llrlr")?;
    let r = refines(&BncPartition::parse("1,3|2|4,5", &x)?, &BncPartition::parse("1,3|2,4,5", &x)?)?;
    c.eq("refines", r, true);
    Ok(())
}

fn restriction(_: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let pi = BncPartition::parse("1,2|3,5,9|4,7|6,8", &chi("lrllrrlrr")?)?;
    let r = restrict(&pi, &[5, 7])?;
    c.eq("partition", r.to_string(), "1,2".into());
    c.eq("sides", r.chi().to_string(), "rr".into());
    Ok(())
}

fn collapse_example(_: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let pi = BncPartition::parse("1,3|2", &chi("lll")?)?;
    c.eq("collapsed", collapse(&pi, 1)?.to_string(), "1,2".into());
    Ok(())
}

fn lateral(_: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let x = chi("lll")?;
    let sigma = BncPartition::one(&x);
    c.eq("{1,2|3}", is_lateral_refinement(&BncPartition::parse("1,2|3", &x)?, &sigma)?, true);
    c.eq("{1,3|2}", is_lateral_refinement(&BncPartition::parse("1,3|2", &x)?, &sigma)?, false);
    c.eq("0_χ", is_lateral_refinement(&BncPartition::zero(&x), &sigma)?, true);
    Ok(())
}

fn nine_node(rng: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let (tr, value, nested) = nine_node_check(rng)?;
    c.eq("trace", tr, NINE_NODE_TRACE.to_string());
    c.eq("value", value, nested);
    Ok(())
}

fn random_tuple(x: &Arc<Bimodule>, chi: &SideMap, rng: &mut ChaCha8Rng) -> bifree::Result<OperatorTuple<Bimodule>> {
    let ops = chi
        .sides()
        .iter()
        .map(|s| match s {
            Side::Left => x.random_left_operator(2, rng),
            Side::Right => x.random_right_operator(2, rng),
        })
        .collect();
    OperatorTuple::new(x.clone(), chi.clone(), ops)
}

fn two_node_choice(rng: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let x = Arc::new(Bimodule::random(2, 1, rng));
    let t = random_tuple(&x, &chi("ll")?, rng)?;
    let o = t.ops();
    let e2 = x.expectation(&o[1])?;
    let via_l = x.expect_word(&[&o[0], &x.make_lb(&e2)?])?;
    let via_r = x.expect_word(&[&o[0], &x.make_rb(&e2)?])?;
    c.eq("L and R choices agree", via_l == via_r, true);
    c.eq("E_0", e_pi(&BncPartition::zero(t.chi()), &t)?, via_l);
    Ok(())
}

fn properties(rng: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let x = Arc::new(Bimodule::random(2, 1, rng));
    let chi = chi("lrlllrrl")?;
    let t = random_tuple(&x, &chi, rng)?;
    let p3 = BncPartition::parse("1,3,4|2,6|5,7,8", &chi)?;
    let p4 = BncPartition::parse("1,2,6|3,7|4,5,8", &chi)?;
    for kind in [MomentKind::Moment, MomentKind::Cumulant] {
        let name = if kind == MomentKind::Moment { "E" } else { "κ" };
        let r = property_iii(kind, &p3, &t, &[vec![0, 2, 3], vec![4, 6, 7], vec![1, 5]])?;
        c.eq(&format!("(iii) for {name}, V = {{1,3,4}}, {{5,7,8}}, {{2,6}}"), r.equal(), true);
        let r = property_iv(kind, &p4, &t, &[2, 3, 4, 6, 7])?;
        c.eq(&format!("(iv) for {name}, V = {{3,4,5,7,8}}: θ, γ"), format!("{},{}", r.theta + 1, r.gamma + 1), "1,6".into());
        c.eq(&format!("(iv) for {name}: equal"), r.equal(), true);
    }
    let b = random_belem(2, 3, rng);
    for q in 0..3 {
        let v = cumulant_vanishes_on_b_entry(&random_tuple(&x, &SideMap::parse("lrl")?, rng)?, q, &b)?;
        c.eq(&format!("κ with b in slot {}", q + 1), v.equal(), true);
    }
    Ok(())
}

fn lr_two(_: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let ds = enumerate_lr(&chi("lr")?, &ShadingMap::parse("1,2")?)?;
    c.eq("diagrams", ds.len(), 4);
    let zero = stratum(&ds, 0);
    c.eq("LR_0", zero.len(), 1);
    c.eq("LR_0 partition", lr0_to_partition(&zero[0])?.to_string(), "1|2".into());
    for d in &ds {
        c.note(d);
    }
    Ok(())
}

fn lr_three(_: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let (x, eps) = (chi("rlr")?, ShadingMap::parse("1,1,2")?);
    let ds = enumerate_lr(&x, &eps)?;
    c.eq("diagrams", ds.len(), 8);
    let zero: Vec<String> =
        stratum(&ds, 0).iter().map(|d| lr0_to_partition(d).map(|p| p.to_string())).collect::<bifree::Result<_>>()?;
    c.eq("LR_0 partitions", zero.join(" ; "), "1|2|3 ; 1,2|3".into());
    let ts = two_sums_check(&BncPartition::zero(&x), &eps)?;
    c.eq("two sums at 0_χ", format!("{} = {}", ts.lhs, ts.rhs), "0 = 0".into());
    Ok(())
}

fn free_product_basis(rng: &mut ChaCha8Rng, c: &mut Checker) -> bifree::Result<()> {
    let comps = vec![Arc::new(Bimodule::central(2, 1)), Arc::new(Bimodule::central(2, 1))];
    let fp = FreeProduct::new(comps.clone(), 3)?;
    c.eq("words", fp.basis_words().len(), 7);
    c.eq("dimension", fp.dim(), 7 * 4);
    let pair = PairOfBFaces::random(comps[0].clone(), 1, 1, 2, rng);
    let f = fp.lift_pair(0, &pair)?;
    let single = comps[0].expect_word(&[&pair.left_gens[0], &pair.right_gens[0]])?;
    c.eq("E(λ(S)ρ(T)) on one component", fp.expect_word(&[&f.left[0], &f.right[0]])?, single);
    c.eq("E(1)", fp.expectation(&bifree::operator_model::FpOp::Identity)?, b_one(2));
    Ok(())
}
