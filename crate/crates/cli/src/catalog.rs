//! The builtin field catalogue.

use cone_verify::fields::BUILTIN_NAMES;
use serde::Serialize;

use crate::args::Format;
use crate::canonical::to_canonical_string;
use crate::error::CliResult;

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub parameters: &'static str,
    pub defaults: &'static str,
    pub description: &'static str,
}

pub fn entries() -> Vec<CatalogEntry> {
    let describe = |name: &'static str| match name {
        "lorenz" => CatalogEntry {
            name,
            parameters: "sigma,rho,beta",
            defaults: "10,28,8/3",
            description: "Lorenz system; singularities at the origin and the two wing equilibria",
        },
        "linear_diag" => CatalogEntry {
            name,
            parameters: "lambda1,...,lambdan",
            defaults: "none",
            description: "diagonal linear field x' = diag(lambda) x",
        },
        "linear_dense" => CatalogEntry {
            name,
            parameters: "a11,a12,...,ann (row-major)",
            defaults: "none",
            description: "linear field x' = A x",
        },
        "saddle_suspension_constant" => CatalogEntry {
            name,
            parameters: "v1,...,vn",
            defaults: "0,1",
            description: "constant field with DX = 0; never strictly separated",
        },
        _ => CatalogEntry { name, parameters: "", defaults: "", description: "" },
    };
    BUILTIN_NAMES.iter().map(|n| describe(n)).collect()
}

pub fn render(format: Format) -> CliResult<String> {
    let list = entries();
    Ok(match format {
        Format::Json => to_canonical_string(&list)?,
        Format::Csv => {
            let mut out = String::from("name,parameters,defaults,description\n");
            for e in &list {
                out.push_str(&format!("{},\"{}\",\"{}\",\"{}\"\n", e.name, e.parameters, e.defaults, e.description));
            }
            out
        }
    })
}
