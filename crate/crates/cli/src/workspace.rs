//! On-disk workspace: a directory of definition files that successive CLI
//! invocations share. Loading is transactional per file: a definition that
//! fails to parse or validate changes nothing.
//!
//! Layout: manifolds/*.toml, maps/*.toml, monomials/*.txt, lifts/*.json,
//! ledgers are referenced by path, not stored.

use cohodyn_core::cohomology::{CohomologyModel, ModelFile};
use cohodyn_core::error::{CoreError, Result};
use cohodyn_core::green::HomogeneousLift;
use cohodyn_core::green::{Lift64, LiftFile};
use cohodyn_core::maps::{MapFile, MapModel};
use cohodyn_core::monomial::{lift_to_text, parse_lift_text, MonomialLift};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub struct Workspace {
    root: PathBuf,
    pub manifolds: BTreeMap<String, Arc<CohomologyModel>>,
    pub maps: BTreeMap<String, MapModel>,
    pub monomials: BTreeMap<String, MonomialLift>,
    pub lifts: BTreeMap<String, Lift64>,
}

fn io_err(context: &str, e: std::io::Error) -> CoreError {
    CoreError::Parse(format!("{context}: {e}"))
}

impl Workspace {
    pub fn open(root: &Path) -> Result<Self> {
        for sub in ["manifolds", "maps", "monomials", "lifts"] {
            fs::create_dir_all(root.join(sub))
                .map_err(|e| io_err(&format!("creating workspace dir {sub}"), e))?;
        }
        let mut ws = Workspace {
            root: root.to_path_buf(),
            manifolds: BTreeMap::new(),
            maps: BTreeMap::new(),
            monomials: BTreeMap::new(),
            lifts: BTreeMap::new(),
        };
        ws.load_all()?;
        Ok(ws)
    }

    fn list_files(&self, sub: &str, ext: &str) -> Result<Vec<PathBuf>> {
        let dir = self.root.join(sub);
        let mut out = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| io_err(&format!("reading {sub}"), e))? {
            let entry = entry.map_err(|e| io_err(&format!("reading {sub}"), e))?;
            let path = entry.path();
            if path.extension().and_then(|s| s.to_str()) == Some(ext) {
                out.push(path);
            }
        }
        out.sort();
        Ok(out)
    }

    fn load_all(&mut self) -> Result<()> {
        for path in self.list_files("manifolds", "toml")? {
            let text = fs::read_to_string(&path)
                .map_err(|e| io_err(&format!("reading {}", path.display()), e))?;
            let model = ModelFile::from_toml(&text)?.into_model()?;
            self.manifolds.insert(model.name().to_string(), model);
        }
        for path in self.list_files("maps", "toml")? {
            let text = fs::read_to_string(&path)
                .map_err(|e| io_err(&format!("reading {}", path.display()), e))?;
            let map = MapFile::from_toml(&text)?.into_map(&self.manifolds)?;
            self.maps.insert(map.name().to_string(), map);
        }
        for path in self.list_files("monomials", "txt")? {
            let text = fs::read_to_string(&path)
                .map_err(|e| io_err(&format!("reading {}", path.display()), e))?;
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("lift")
                .to_string();
            self.monomials.insert(name, parse_lift_text(&text)?);
        }
        for path in self.list_files("lifts", "json")? {
            let text = fs::read_to_string(&path)
                .map_err(|e| io_err(&format!("reading {}", path.display()), e))?;
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("lift")
                .to_string();
            self.lifts
                .insert(name, LiftFile::from_json(&text)?.into_lift()?);
        }
        Ok(())
    }

    pub fn save_manifold(&mut self, model: Arc<CohomologyModel>) -> Result<()> {
        let name = model.name().to_string();
        if let Some(existing) = self.manifolds.get(&name) {
            if **existing != *model {
                return Err(CoreError::Naming(format!(
                    "manifold {name:?} already exists with a different definition"
                )));
            }
            return Ok(());
        }
        let text = ModelFile::from_model(&model).to_toml()?;
        let path = self.root.join("manifolds").join(format!("{name}.toml"));
        fs::write(&path, text).map_err(|e| io_err(&format!("writing {}", path.display()), e))?;
        self.manifolds.insert(name, model);
        Ok(())
    }

    pub fn save_map(&mut self, map: MapModel) -> Result<()> {
        self.save_manifold(map.source().clone())?;
        self.save_manifold(map.target().clone())?;
        let name = map.name().to_string();
        let text = MapFile::from_map(&map).to_toml()?;
        let path = self.root.join("maps").join(format!("{name}.toml"));
        fs::write(&path, text).map_err(|e| io_err(&format!("writing {}", path.display()), e))?;
        self.maps.insert(name, map);
        Ok(())
    }

    pub fn save_monomial(&mut self, name: &str, lift: MonomialLift) -> Result<()> {
        let path = self.root.join("monomials").join(format!("{name}.txt"));
        fs::write(&path, lift_to_text(&lift))
            .map_err(|e| io_err(&format!("writing {}", path.display()), e))?;
        self.monomials.insert(name.to_string(), lift);
        Ok(())
    }

    pub fn manifold(&self, name: &str) -> Result<&Arc<CohomologyModel>> {
        self.manifolds
            .get(name)
            .ok_or_else(|| CoreError::Lookup(format!("unknown manifold {name:?}")))
    }

    pub fn map(&self, name: &str) -> Result<&MapModel> {
        self.maps
            .get(name)
            .ok_or_else(|| CoreError::Lookup(format!("unknown map {name:?}")))
    }

    /// Resolve a name to a monomial lift: a stored lift, or the lift
    /// attached to a stored map.
    pub fn monomial_lift(&self, name: &str) -> Result<MonomialLift> {
        if let Some(lift) = self.monomials.get(name) {
            return Ok(lift.clone());
        }
        if let Some(map) = self.maps.get(name) {
            if let Some(lift) = map.monomial() {
                return Ok(lift.clone());
            }
            return Err(CoreError::Capability(format!(
                "map {name:?} has no monomial lift"
            )));
        }
        Err(CoreError::Lookup(format!(
            "no monomial map or lift named {name:?}"
        )))
    }

    /// Resolve a name to a float lift for potential evaluation: a stored
    /// JSON lift, or the monomial lift of a stored map/monomial.
    pub fn float_lift(&self, name: &str) -> Result<Lift64> {
        if let Some(lift) = self.lifts.get(name) {
            return Ok(lift.clone());
        }
        if let Ok(m) = self.monomial_lift(name) {
            return HomogeneousLift::from_monomial(&m);
        }
        Err(CoreError::Lookup(format!(
            "no lift named {name:?} (checked lifts, monomials, and map lifts)"
        )))
    }
}
