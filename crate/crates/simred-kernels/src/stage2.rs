//! Stage-2 program builders: fold the stage-1 partials down to one value
//! with a single work-group.
//!
//! Interface: read-only buffer `partials`, writable buffer `out` (length 1),
//! scalar `m` = number of valid partials. Lanes `li >= m` contribute masked
//! (inert) terms, so `m` may be smaller than the group.

use simred_core::ir::dsl::*;
use simred_core::ir::{BufferParam, Program, ScalarParam};
use simred_core::ir::LocalArray;
use simred_core::{CombineOp, ElemType};

use crate::expr_util::{combine_expr, masked_global_term};

/// Barriered sequential-addressing tree over one work-group of `lanes`
/// lanes. Used as the second stage for every local-memory strategy.
pub fn build_stage2_local(op: CombineOp, lanes: usize) -> Program {
    let elem = op.elem_type();
    let flag = local_id().lt(v("m"));
    let body = vec![
        let_("flag", flag),
        store_local(
            "scratch",
            local_id(),
            masked_global_term(op, "partials", local_id(), v("flag")),
        ),
        barrier(),
        let_("offset", local_size().shr(ci(1))),
        while_(
            v("offset").gt(ci(0)),
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
        if_(
            local_id().eq_(ci(0)),
            vec![store("out", ci(0), load_local("scratch", ci(0)))],
            vec![],
        ),
    ];
    Program {
        name: "stage2-local".to_string(),
        buffers: vec![
            BufferParam { name: "partials".into(), elem, writable: false },
            BufferParam { name: "out".into(), elem, writable: true },
        ],
        scalars: vec![ScalarParam { name: "m".into(), elem: ElemType::Int }],
        local_arrays: vec![LocalArray { name: "scratch".into(), elem, len: lanes }],
        body,
    }
}

/// Single-wavefront shuffle fold: `wavefront_width` lanes, no local memory,
/// no barriers. Pairs with the shuffle stage 1, which leaves at most
/// `wavefront_width` partials.
pub fn build_stage2_shuffle(op: CombineOp, wavefront_width: usize) -> Program {
    let elem = op.elem_type();
    let mut body = vec![
        let_("flag", local_id().lt(v("m"))),
        let_(
            "acc",
            masked_global_term(op, "partials", local_id(), v("flag")),
        ),
    ];
    let mut delta = (wavefront_width / 2) as u32;
    while delta > 0 {
        body.push(assign("acc", combine_expr(op, v("acc"), shfl_down("acc", delta))));
        delta /= 2;
    }
    body.push(if_(
        local_id().eq_(ci(0)),
        vec![store("out", ci(0), v("acc"))],
        vec![],
    ));
    Program {
        name: "stage2-shuffle".to_string(),
        buffers: vec![
            BufferParam { name: "partials".into(), elem, writable: false },
            BufferParam { name: "out".into(), elem, writable: true },
        ],
        scalars: vec![ScalarParam { name: "m".into(), elem: ElemType::Int }],
        local_arrays: vec![],
        body,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use simred_core::{validate_program, CombineKind, ElemType};

    #[test]
    fn stage2_programs_validate() {
        for ck in CombineKind::ALL {
            for elem in [ElemType::Int, ElemType::F32, ElemType::F64] {
                let Some(op) = CombineOp::new(ck, elem) else { continue };
                let p = build_stage2_local(op, 256);
                assert!(validate_program(&p).ok(), "{ck} {elem}: {}", validate_program(&p));
                let p = build_stage2_shuffle(op, 64);
                assert!(validate_program(&p).ok(), "{ck} {elem}: {}", validate_program(&p));
            }
        }
    }
}
