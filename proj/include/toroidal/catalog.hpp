#pragma once

#include "toroidal/anmod.hpp"
#include "toroidal/template.hpp"

namespace toroidal {

struct UnknownFamily : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CatalogOptions {
    long r_max = 2;       // k_r index range for the k-identity / DeltaK suites
    long idx = 2;         // |i|,|j| bound on the doubled X-index lattice
    long total_lo = -2;   // group-3 index total window i+j+N/2
    long total_hi = 2;
    int serre_lo = -2, serre_hi = 2;
    int hh_range = 3;
};

// Fully instantiated templates for one family on one module. Index
// parameters are ranged per the options; scalars (levels, psi0) are read
// off the module handle.
std::vector<RelationTemplate> catalog_family(const std::string& family, const ModuleHandle& mod,
                                             const CatalogOptions& opt = {});

const std::vector<std::string>& known_families();

// Human-readable catalog dump keyed to the relation names.
std::string render_catalog(const ModuleHandle& mod, const CatalogOptions& opt = {});

} // namespace toroidal
