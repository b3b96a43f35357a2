//! Stage-1 program builders: one per reduction strategy.
//!
//! Every stage-1 program has the same interface — read-only buffer `input`,
//! writable buffer `partials`, scalar `n` (element count) — and the same
//! contract: after the launch, `partials[g]` holds the combined value of the
//! elements group `g` consumed, and every element of `input[0..n]` was
//! consumed by exactly one lane. Stage 2 folds `partials` down to one value.
//!
//! The shuffle strategy writes one partial per *wavefront* instead of per
//! group; see [`build_stage1`] for the per-strategy partial count.

use simred_core::ir::dsl::*;
use simred_core::ir::{BufferParam, Instr, LocalArray, Program, ScalarParam};
use simred_core::{CombineOp, ElemType};

use crate::expr_util::{combine_all, combine_expr, identity_expr, masked_global_term, masked_value};
use crate::kinds::KernelKind;

// ---------------------------------------------------------------------------
// Load-phase builders
// ---------------------------------------------------------------------------

/// Grid-stride accumulation, one element per iteration:
/// `for (i = gid; i < n; i += global_size) acc ⊕= input[i]`.
fn single_load_loop(op: CombineOp) -> Vec<Instr> {
    vec![
        let_("gid", global_id()),
        let_("acc", identity_expr(op)),
        while_(
            v("gid").lt(v("n")),
            vec![
                let_("element", load("input", v("gid"))),
                assign("acc", combine_expr(op, v("acc"), v("element"))),
                assign("gid", v("gid") + global_size()),
            ],
        ),
    ]
}

/// Grid-stride accumulation, two elements per iteration in one statement:
/// `acc ⊕= input[i] ⊕ input[i + global_size]`, stepping `2 * global_size`.
/// The second load is masked against `n`.
fn paired_load_loop(op: CombineOp) -> Vec<Instr> {
    let second = v("gid") + global_size();
    let term = masked_global_term(op, "input", second.clone(), second.lt(v("n")));
    vec![
        let_("gid", global_id()),
        let_("acc", identity_expr(op)),
        while_(
            v("gid").lt(v("n")),
            vec![
                assign(
                    "acc",
                    combine_expr(op, v("acc"), combine_expr(op, load("input", v("gid")), term)),
                ),
                assign("gid", v("gid") + global_size() + global_size()),
            ],
        ),
    ]
}

/// Grid-stride accumulation, `factor` elements per iteration at offsets
/// `k * global_size` (k = 0..factor), stepping `factor * global_size`.
/// Load 0 is covered by the loop guard; the rest are masked. The offsets
/// keep every unrolled load unit-stride across its wavefront, so per-element
/// global traffic does not depend on the factor (a per-lane block layout
/// would turn each load into a stride-`factor` scatter instead).
fn strided_load_loop(op: CombineOp, factor: u32) -> Vec<Instr> {
    let mut body = vec![let_("t0", load("input", v("pos")))];
    for k in 1..factor as i64 {
        let idx = v("pos") + global_size() * ci(k);
        let flag = idx.lt(v("n"));
        body.push(let_(
            &format!("t{k}"),
            masked_global_term(op, "input", v("pos") + global_size() * ci(k), flag),
        ));
    }
    let terms = (0..factor as i64).map(|k| v(&format!("t{k}"))).collect();
    body.push(assign("acc", combine_expr(op, v("acc"), combine_all(op, terms))));
    body.push(assign("pos", v("pos") + global_size() * ci(factor as i64)));
    vec![
        let_("pos", global_id()),
        let_("acc", identity_expr(op)),
        while_(v("pos").lt(v("n")), body),
    ]
}

// ---------------------------------------------------------------------------
// Tree-phase builders
// ---------------------------------------------------------------------------

/// `scratch[local_id] = acc` followed by a barrier.
fn fill_scratch() -> Vec<Instr> {
    vec![store_local("scratch", local_id(), v("acc")), barrier()]
}

/// Interleaved tree with a modulo guard: lanes where `li % 2s == 0` combine
/// `scratch[li]` with `scratch[li + s]`, `s` doubling.
fn modulo_tree(op: CombineOp) -> Vec<Instr> {
    vec![
        let_("stride", ci(1)),
        while_(
            v("stride").lt(local_size()),
            vec![
                if_(
                    (local_id().rem(v("stride") * ci(2))).eq_(ci(0)),
                    vec![
                        let_("mine", load_local("scratch", local_id())),
                        let_("other", load_local("scratch", local_id() + v("stride"))),
                        store_local("scratch", local_id(), combine_expr(op, v("mine"), v("other"))),
                    ],
                    vec![],
                ),
                barrier(),
                assign("stride", v("stride") * ci(2)),
            ],
        ),
    ]
}

/// Interleaved tree with strided indexing: lane `li` targets
/// `index = 2 * s * li`, guarded by `index < local_size`.
fn strided_tree(op: CombineOp) -> Vec<Instr> {
    vec![
        let_("stride", ci(1)),
        while_(
            v("stride").lt(local_size()),
            vec![
                let_("index", v("stride") * ci(2) * local_id()),
                if_(
                    v("index").lt(local_size()),
                    vec![
                        let_("mine", load_local("scratch", v("index"))),
                        let_("other", load_local("scratch", v("index") + v("stride"))),
                        store_local("scratch", v("index"), combine_expr(op, v("mine"), v("other"))),
                    ],
                    vec![],
                ),
                barrier(),
                assign("stride", v("stride") * ci(2)),
            ],
        ),
    ]
}

/// Sequential-addressing tree: lanes `li < offset` combine `scratch[li]`
/// with `scratch[li + offset]`, `offset` halving from `local_size / 2` down
/// to `floor` (exclusive). A barrier closes every level.
fn sequential_tree_down_to(op: CombineOp, floor: i64) -> Vec<Instr> {
    vec![
        let_("offset", local_size().shr(ci(1))),
        while_(
            v("offset").gt(ci(floor)),
            vec![
                if_(
                    local_id().lt(v("offset")),
                    vec![
                        let_("mine", load_local("scratch", local_id())),
                        let_("other", load_local("scratch", local_id() + v("offset"))),
                        store_local("scratch", local_id(), combine_expr(op, v("mine"), v("other"))),
                    ],
                    vec![],
                ),
                barrier(),
                assign("offset", v("offset").shr(ci(1))),
            ],
        ),
    ]
}

/// The same barriered levels as [`sequential_tree_down_to`] but unrolled at
/// build time: one `If` + barrier per offset in `local_size/2 .. > floor`.
fn unrolled_tree_down_to(op: CombineOp, local_size: usize, floor: usize) -> Vec<Instr> {
    let mut out = Vec::new();
    let mut offset = local_size / 2;
    while offset > floor {
        out.push(if_(
            local_id().lt(ci(offset as i64)),
            vec![
                let_(&format!("mine{offset}"), load_local("scratch", local_id())),
                let_(
                    &format!("other{offset}"),
                    load_local("scratch", local_id() + ci(offset as i64)),
                ),
                store_local(
                    "scratch",
                    local_id(),
                    combine_expr(op, v(&format!("mine{offset}")), v(&format!("other{offset}"))),
                ),
            ],
            vec![],
        ));
        out.push(barrier());
        offset /= 2;
    }
    out
}

/// Unbarriered single-wavefront tail: one `If(li < start)` whose body
/// combines offsets `start, start/2, ..., 1` with one statement per level,
/// where `start = min(w, local_size/2)`. The guard bounds every read
/// (`li + offset <= 2*start - 1 < local_size`), the active lanes fit in one
/// wavefront, and wavefront-synchronous execution makes the read-then-write
/// ordering safe without barriers.
fn wavefront_tail(op: CombineOp, local_size: usize, w: usize) -> Vec<Instr> {
    let start = w.min(local_size / 2);
    let mut stmts = Vec::new();
    let mut offset = start;
    while offset > 0 {
        stmts.push(store_local(
            "scratch",
            local_id(),
            combine_expr(
                op,
                load_local("scratch", local_id()),
                load_local("scratch", local_id() + ci(offset as i64)),
            ),
        ));
        offset /= 2;
    }
    vec![if_(local_id().lt(ci(start as i64)), stmts, vec![])]
}

/// Branch-free sequential tree: every lane executes every level; a 0/1 flag
/// folds the guard into the address and the contribution. No per-level
/// barriers — correct when the group is a single wavefront.
fn branchless_tree(op: CombineOp) -> Vec<Instr> {
    let partner = load_local("scratch", local_id() + v("flag") * v("offset"));
    vec![
        let_("offset", local_size().shr(ci(1))),
        while_(
            v("offset").gt(ci(0)),
            vec![
                let_("flag", local_id().lt(v("offset"))),
                store_local(
                    "scratch",
                    local_id(),
                    combine_expr(
                        op,
                        load_local("scratch", local_id()),
                        masked_value(op, partner.clone(), v("flag")),
                    ),
                ),
                assign("offset", v("offset").shr(ci(1))),
            ],
        ),
    ]
}

/// `if (li == 0) partials[group_id] = scratch[0]`.
fn write_group_partial() -> Instr {
    if_(
        local_id().eq_(ci(0)),
        vec![store("partials", group_id(), load_local("scratch", ci(0)))],
        vec![],
    )
}

// ---------------------------------------------------------------------------
// Assembly
// ---------------------------------------------------------------------------

fn local_program(name: &str, elem: ElemType, local_size: usize, body: Vec<Instr>) -> Program {
    Program {
        name: name.to_string(),
        buffers: vec![
            BufferParam { name: "input".into(), elem, writable: false },
            BufferParam { name: "partials".into(), elem, writable: true },
        ],
        scalars: vec![ScalarParam { name: "n".into(), elem: ElemType::Int }],
        local_arrays: vec![LocalArray { name: "scratch".into(), elem, len: local_size }],
        body,
    }
}

/// Build the stage-1 program for `kind`.
///
/// `local_size` and `wavefront_width` must match the launch configuration —
/// the unrolled strategies bake them into the program. Local-memory
/// strategies write one partial per group; `Shuffle` writes one per
/// wavefront (`partials[global_id / w]`) and uses no local memory.
pub fn build_stage1(
    kind: KernelKind,
    op: CombineOp,
    local_size: usize,
    wavefront_width: usize,
) -> Program {
    let elem = op.elem_type();
    let (ls, w) = (local_size, wavefront_width);
    match kind {
        KernelKind::HarrisK1 => {
            let mut body = single_load_loop(op);
            body.extend(fill_scratch());
            body.extend(modulo_tree(op));
            body.push(write_group_partial());
            local_program("harris-k1-stage1", elem, ls, body)
        }
        KernelKind::HarrisK2 => {
            let mut body = single_load_loop(op);
            body.extend(fill_scratch());
            body.extend(strided_tree(op));
            body.push(write_group_partial());
            local_program("harris-k2-stage1", elem, ls, body)
        }
        KernelKind::HarrisK3 => {
            let mut body = single_load_loop(op);
            body.extend(fill_scratch());
            body.extend(sequential_tree_down_to(op, 0));
            body.push(write_group_partial());
            local_program("harris-k3-stage1", elem, ls, body)
        }
        KernelKind::HarrisK4 => {
            let mut body = paired_load_loop(op);
            body.extend(fill_scratch());
            body.extend(sequential_tree_down_to(op, 0));
            body.push(write_group_partial());
            local_program("harris-k4-stage1", elem, ls, body)
        }
        KernelKind::HarrisK5 => {
            let mut body = paired_load_loop(op);
            body.extend(fill_scratch());
            body.extend(sequential_tree_down_to(op, w as i64));
            body.extend(wavefront_tail(op, ls, w));
            body.push(write_group_partial());
            local_program("harris-k5-stage1", elem, ls, body)
        }
        KernelKind::HarrisK6 => {
            let mut body = paired_load_loop(op);
            body.extend(fill_scratch());
            body.extend(unrolled_tree_down_to(op, ls, w));
            body.extend(wavefront_tail(op, ls, w));
            body.push(write_group_partial());
            local_program("harris-k6-stage1", elem, ls, body)
        }
        KernelKind::HarrisK7 { factor } => {
            let mut body = strided_load_loop(op, factor.max(1));
            body.extend(fill_scratch());
            body.extend(unrolled_tree_down_to(op, ls, w));
            body.extend(wavefront_tail(op, ls, w));
            body.push(write_group_partial());
            local_program("harris-k7-stage1", elem, ls, body)
        }
        KernelKind::Shuffle => {
            let mut body = single_load_loop(op);
            let mut delta = (w / 2) as u32;
            while delta > 0 {
                body.push(assign(
                    "acc",
                    combine_expr(op, v("acc"), shfl_down("acc", delta)),
                ));
                delta /= 2;
            }
            body.push(if_(
                (local_id().rem(ci(w as i64))).eq_(ci(0)),
                vec![store("partials", global_id() / ci(w as i64), v("acc"))],
                vec![],
            ));
            Program {
                name: "shuffle-stage1".to_string(),
                buffers: vec![
                    BufferParam { name: "input".into(), elem, writable: false },
                    BufferParam { name: "partials".into(), elem, writable: true },
                ],
                scalars: vec![ScalarParam { name: "n".into(), elem: ElemType::Int }],
                local_arrays: vec![],
                body,
            }
        }
        KernelKind::Catanzaro => {
            let mut body = single_load_loop(op);
            body.extend(fill_scratch());
            body.extend(sequential_tree_down_to(op, 0));
            body.push(write_group_partial());
            local_program("catanzaro-stage1", elem, ls, body)
        }
        KernelKind::NewStage1 { factor } => {
            let mut body = strided_load_loop(op, factor.max(1));
            body.extend(fill_scratch());
            body.extend(sequential_tree_down_to(op, 0));
            body.push(write_group_partial());
            local_program("new-stage1", elem, ls, body)
        }
        KernelKind::NewStage1Branchless { factor } => {
            let mut body = strided_load_loop(op, factor.max(1));
            body.extend(fill_scratch());
            body.extend(branchless_tree(op));
            body.push(write_group_partial());
            local_program("new-branchless-stage1", elem, ls, body)
        }
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use simred_core::{validate_program, CombineKind};

    #[test]
    fn every_program_validates() {
        let elems = [ElemType::Int, ElemType::F32, ElemType::F64];
        for kind in KernelKind::catalog(4) {
            for ck in CombineKind::ALL {
                for elem in elems {
                    let Some(op) = CombineOp::new(ck, elem) else { continue };
                    for (ls, w) in [(64usize, 64usize), (128, 64), (256, 64), (64, 32), (256, 32)]
                    {
                        let p = build_stage1(kind, op, ls, w);
                        let report = validate_program(&p);
                        assert!(report.ok(), "{kind} {ck} {elem} ls={ls} w={w}: {report}");
                    }
                }
            }
        }
    }

    #[test]
    fn unrolled_tree_levels_match_geometry() {
        // ls=256, w=64: one barriered level (offset 128), then the tail
        // handles 64..1 inside a single If.
        let op = CombineOp::new(CombineKind::Add, ElemType::Int).unwrap();
        let levels = unrolled_tree_down_to(op, 256, 64);
        // Each level is If + Barrier.
        assert_eq!(levels.len(), 2);
        let tail = wavefront_tail(op, 256, 64);
        assert_eq!(tail.len(), 1);
        match &tail[0] {
            Instr::If(_, then, _) => assert_eq!(then.len(), 7), // offsets 64,32,16,8,4,2,1
            other => panic!("expected If, got {other:?}"),
        }
        // ls=64=w: no barriered levels, tail covers 32..1.
        assert!(unrolled_tree_down_to(op, 64, 64).is_empty());
        match &wavefront_tail(op, 64, 64)[0] {
            Instr::If(_, then, _) => assert_eq!(then.len(), 6), // offsets 32,16,8,4,2,1
            other => panic!("expected If, got {other:?}"),
        }
    }
}
