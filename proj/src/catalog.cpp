// Shapes catalog, INI layout, one [shape.NAME] section per shape

#include <cstdio>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ddsim/pulses.hpp"

#ifndef DDSIM_DATA_DIR
#define DDSIM_DATA_DIR "data"
#endif

namespace ddsim {

namespace {

namespace pt = boost::property_tree;

std::vector<double> parse_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("catalog: bad number '" + item + "' in " + what);
        }
    }
    return out;
}

std::string format_list(const std::vector<double>& values)
{
    std::string out;
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17e", values[i]);
        if (i) out += ", ";
        out += buf;
    }
    return out;
}

} // namespace

std::string default_catalog_path()
{
    return std::string(DDSIM_DATA_DIR) + "/shapes.cat";
}

std::vector<CatalogEntry> read_catalog(const std::string& path)
{
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("catalog: " + std::string(e.what()));
    }
    std::vector<CatalogEntry> entries;
    for (const auto& [section, body] : tree) {
        if (section.rfind("shape.", 0) != 0) continue;
        CatalogEntry e;
        e.name = section.substr(6);
        try {
            e.order = body.get<int>("order");
            e.angle = body.get<double>("angle");
            const auto amps = parse_list(body.get<std::string>("amplitudes"), e.name);
            const auto fracs = parse_list(body.get<std::string>("fractions"), e.name);
            if (amps.size() != fracs.size() || amps.empty()) {
                throw ConfigError("catalog: amplitude/fraction count mismatch in " + e.name);
            }
            for (std::size_t i = 0; i < amps.size(); ++i) e.segments.push_back({amps[i], fracs[i]});
            e.config_hash = body.get<std::string>("config_hash", "");
            e.seed = body.get<std::uint64_t>("seed", 0);
        } catch (const pt::ptree_error& err) {
            throw ConfigError("catalog: shape " + e.name + ": " + err.what());
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_catalog(const std::string& path, const std::vector<CatalogEntry>& entries)
{
    std::ofstream out(path);
    if (!out) throw ConfigError("catalog: cannot write " + path);
    out << "# ddsim shapes catalog; amplitudes are v*tau (pulse duration normalized to 1)\n";
    char buf[40];
    for (const auto& e : entries) {
        std::vector<double> amps, fracs;
        for (const auto& s : e.segments) {
            amps.push_back(s.amplitude);
            fracs.push_back(s.fraction);
        }
        std::snprintf(buf, sizeof buf, "%.17e", e.angle);
        out << "\n[shape." << e.name << "]\n"
            << "order = " << e.order << "\n"
            << "angle = " << buf << "\n"
            << "amplitudes = " << format_list(amps) << "\n"
            << "fractions = " << format_list(fracs) << "\n"
            << "config_hash = " << e.config_hash << "\n"
            << "seed = " << e.seed << "\n";
    }
}

const CatalogEntry& find_entry(const std::vector<CatalogEntry>& entries, const std::string& name)
{
    for (const auto& e : entries) {
        if (e.name == name) return e;
    }
    throw ConfigError("catalog has no shape named '" + name + "'");
}

CatalogEntry to_entry(const PulseShape& shape, const std::string& config_hash, std::uint64_t seed)
{
    CatalogEntry e;
    e.name = shape.name;
    e.order = shape.order;
    e.angle = shape.target_angle;
    for (const auto& s : shape.segments) e.segments.push_back({s.amplitude * shape.tau_nom, s.fraction});
    e.config_hash = config_hash;
    e.seed = seed;
    return e;
}

} // namespace ddsim
