//! The `.pwk` files committed under `zoo/` are exactly the canonical
//! exports of the catalog; regenerate with `pwk zoo export` if this fails.

use pwk_core::{dsl, zoo};
use std::path::Path;

#[test]
fn committed_zoo_files_are_fresh() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../zoo");
    for e in zoo::list() {
        let Some(spec) = &e.spec else { continue };
        let path = root.join(format!("{}.pwk", e.name));
        let on_disk = std::fs::read_to_string(&path)
            .unwrap_or_else(|err| panic!("{}: {err}", path.display()));
        assert_eq!(
            on_disk,
            dsl::serialize(spec),
            "{} is stale; run: pwk zoo export {} -o zoo/{}.pwk",
            path.display(),
            e.name,
            e.name
        );
    }
}
