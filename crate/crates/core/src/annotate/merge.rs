use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::diff::matching_pairs;

pub const MARKER_OURS: &str = "<<<<<<< ours";
pub const MARKER_BASE: &str = "||||||| base";
pub const MARKER_SEP: &str = "=======";
pub const MARKER_THEIRS: &str = ">>>>>>> theirs";

/// One region where both sides changed the base differently. Ranges are
/// 0-based, half-open line ranges into the respective inputs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub base: Range<usize>,
    pub ours: Range<usize>,
    pub theirs: Range<usize>,
    pub ours_lines: Vec<String>,
    pub theirs_lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeResult {
    /// Merged text; conflicted regions carry diff3-style markers.
    pub merged_lines: Vec<String>,
    pub conflicts: Vec<Conflict>,
    pub clean: bool,
}

impl MergeResult {
    pub fn text(&self) -> String {
        self.merged_lines.join("\n")
    }
}

/// Three-way line merge.
///
/// Base lines matched in both `base -> ours` and `base -> theirs` are sync
/// points; between consecutive sync points the chunk is taken from whichever
/// side changed it, from either side if both made the same change, and is a
/// conflict otherwise.
pub fn diff3_merge<S: AsRef<str>>(base: &[S], ours: &[S], theirs: &[S]) -> MergeResult {
    let base: Vec<&str> = base.iter().map(AsRef::as_ref).collect();
    let ours: Vec<&str> = ours.iter().map(AsRef::as_ref).collect();
    let theirs: Vec<&str> = theirs.iter().map(AsRef::as_ref).collect();

    let to_ours = match_map(&base, &ours);
    let to_theirs = match_map(&base, &theirs);

    let mut merged: Vec<String> = Vec::new();
    let mut conflicts = Vec::new();
    let (mut i, mut o, mut t) = (0, 0, 0);
    loop {
        if i < base.len() && to_ours[i] == Some(o) && to_theirs[i] == Some(t) {
            merged.push(base[i].to_owned());
            i += 1;
            o += 1;
            t += 1;
            continue;
        }
        let next = (i..base.len()).find(|&j| to_ours[j].is_some() && to_theirs[j].is_some());
        let (ie, oe, te) = match next {
            Some(j) => (j, to_ours[j].unwrap_or(o), to_theirs[j].unwrap_or(t)),
            None => (base.len(), ours.len(), theirs.len()),
        };
        let b = &base[i..ie];
        let ov = &ours[o..oe];
        let tv = &theirs[t..te];
        if ov == b {
            merged.extend(tv.iter().map(|s| (*s).to_owned()));
        } else if tv == b || ov == tv {
            merged.extend(ov.iter().map(|s| (*s).to_owned()));
        } else {
            merged.push(MARKER_OURS.to_owned());
            merged.extend(ov.iter().map(|s| (*s).to_owned()));
            merged.push(MARKER_BASE.to_owned());
            merged.extend(b.iter().map(|s| (*s).to_owned()));
            merged.push(MARKER_SEP.to_owned());
            merged.extend(tv.iter().map(|s| (*s).to_owned()));
            merged.push(MARKER_THEIRS.to_owned());
            conflicts.push(Conflict {
                base: i..ie,
                ours: o..oe,
                theirs: t..te,
                ours_lines: ov.iter().map(|s| (*s).to_owned()).collect(),
                theirs_lines: tv.iter().map(|s| (*s).to_owned()).collect(),
            });
        }
        i = ie;
        o = oe;
        t = te;
        if next.is_none() {
            break;
        }
    }

    MergeResult { merged_lines: merged, clean: conflicts.is_empty(), conflicts }
}

fn match_map(base: &[&str], other: &[&str]) -> Vec<Option<usize>> {
    let mut map = vec![None; base.len()];
    for (i, j) in matching_pairs(base, other) {
        map[i] = Some(j);
    }
    map
}
