//! Polyline geometry export in OBJ line-element form, and its reader.
//!
//! Vertices are written in millimetres and shared between segments. Each
//! conductor group starts with `g <name>`; `# closed <0|1>` and
//! `# current_A <value>` comments carry what OBJ itself cannot, so the file
//! can be read back into an equivalent [`SegmentList`].

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::{Segment, SegmentList};
use crate::Vec3;

fn obj_name(name: &str) -> String {
    name.split_whitespace().collect::<Vec<_>>().join("_")
}

pub fn export_obj(list: &SegmentList) -> String {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut id = |p: Vec3| -> usize {
        let mm = p * 1e3;
        let key = mm.to_array().map(f64::to_bits);
        *index.entry(key).or_insert_with(|| {
            vertices.push(mm);
            vertices.len()
        })
    };
    let mut body = String::new();
    for (g, group) in list.groups().iter().enumerate() {
        body.push_str(&format!(
            "g {}\n# closed {}\n",
            obj_name(&group.name),
            u8::from(group.closed)
        ));
        let mut current = None;
        for s in list.group_segments(g) {
            if current != Some(s.current) {
                body.push_str(&format!("# current_A {}\n", s.current));
                current = Some(s.current);
            }
            let (i, j) = (id(s.a), id(s.b));
            body.push_str(&format!("l {i} {j}\n"));
        }
    }
    let mut out = String::from("# motfield polyline geometry, units mm\n");
    for v in &vertices {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    out.push_str(&body);
    out
}

pub fn import_obj(text: &str) -> Result<SegmentList> {
    let bad = |line: usize, msg: &str| Error::invalid_input(format!("OBJ line {line}: {msg}"));
    let mut vertices = Vec::new();
    let mut list = SegmentList::new();
    let mut group: Option<usize> = None;
    let mut current: Option<f64> = None;
    for (n, raw) in text.lines().enumerate() {
        let n = n + 1;
        let mut parts = raw.split_whitespace();
        match parts.next() {
            Some("v") => {
                let c: Vec<f64> = parts
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(n, "bad vertex"))?;
                if c.len() != 3 {
                    return Err(bad(n, "vertex needs three coordinates"));
                }
                vertices.push(Vec3::new(c[0], c[1], c[2]) / 1e3);
            }
            Some("g") => {
                let name = parts.collect::<Vec<_>>().join(" ");
                group = Some(list.add_group(name, false));
                current = None;
            }
            Some("l") => {
                let g = group.ok_or_else(|| bad(n, "line element before any group"))?;
                let i = current.ok_or_else(|| bad(n, "line element without a current"))?;
                let idx: Vec<usize> = parts
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| bad(n, "bad vertex index"))?;
                if idx.len() < 2 {
                    return Err(bad(n, "line element needs two vertices"));
                }
                let get = |k: usize| {
                    k.checked_sub(1)
                        .and_then(|k| vertices.get(k).copied())
                        .ok_or_else(|| bad(n, "vertex index out of range"))
                };
                for w in idx.windows(2) {
                    list.push(g, Segment::new(get(w[0])?, get(w[1])?, i)?);
                }
            }
            Some("#") => match (parts.next(), parts.next()) {
                (Some("current_A"), Some(v)) => {
                    current = Some(v.parse().map_err(|_| bad(n, "bad current"))?);
                }
                (Some("closed"), Some(v)) => {
                    let g = group.ok_or_else(|| bad(n, "closed flag before any group"))?;
                    list.set_group_closed(g, v == "1");
                }
                _ => {}
            },
            _ => {}
        }
    }
    list.validate()?;
    Ok(list)
}
