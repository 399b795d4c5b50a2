//! Compile and run a small C program against the generated header and the
//! static library, exercising the handle lifecycle end to end.

use std::path::PathBuf;
use std::process::Command;

const DEMO: &str = r#"
#include <assert.h>
#include <stdio.h>
#include <string.h>
#include "mmp.h"

int main(void) {
    MmpHypergraph *h = NULL;
    MmpStatus st = mmp_parse("1234,4567,789A,ABCD,DEFG,GHI1,35CE,29BI,68FH.", 4, &h);
    assert(st == MmpStatus_Ok);
    assert(mmp_order(h) == 18);
    assert(mmp_size(h) == 9);
    assert(mmp_dimension(h) == 4);
    assert(mmp_is_valid(h, 1) == 1);
    assert(mmp_has_parity_proof(h) == 1);

    uint8_t binary = 9;
    assert(mmp_is_binary(h, 0, &binary) == MmpStatus_Ok);
    assert(binary == 0);

    MmpIndices idx;
    assert(mmp_classical_indices(h, 1, 0, 0, 0, &idx) == MmpStatus_Ok);
    assert(idx.hi_c_max == 4 && idx.hi_c_min == 3);
    assert(idx.l_c_max == 8 && idx.l_c_min == 6);
    assert(idx.exact == 1);

    char *s = mmp_serialize(h);
    assert(strcmp(s, "1234,4567,789A,ABCD,DEFG,GHI1,35CE,29BI,68FH.") == 0);
    mmp_string_free(s);
    mmp_hypergraph_free(h);

    MmpHypergraph *bad = NULL;
    assert(mmp_parse("12,23", 0, &bad) == MmpStatus_ParseError);
    assert(mmp_last_error() != NULL);

    puts("c header demo ok");
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    // The static library lands next to the test binaries.
    let mut lib_dir = PathBuf::from(std::env::current_exe().unwrap());
    lib_dir.pop(); // test binary name
    lib_dir.pop(); // deps/
    let lib = lib_dir.join("libmmp_capi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());

    let tmp = std::env::temp_dir().join(format!("mmp_c_demo_{}", std::process::id()));
    std::fs::create_dir_all(&tmp).unwrap();
    let src = tmp.join("demo.c");
    std::fs::write(&src, DEMO).unwrap();
    let exe = tmp.join("demo");

    let compile = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .arg("-lpthread")
        .arg("-ldl")
        .arg("-lm")
        .arg("-o")
        .arg(&exe)
        .output()
        .expect("cc must be available");
    assert!(
        compile.status.success(),
        "compile failed: {}",
        String::from_utf8_lossy(&compile.stderr)
    );

    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "demo failed: {}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("c header demo ok"));
}
