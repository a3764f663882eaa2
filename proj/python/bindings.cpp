#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gridcarbon/io.hpp"

namespace py = pybind11;
using namespace gridcarbon;

PYBIND11_MODULE(_core, m) {
  m.doc() = "DC power flow emissions planning toolkit";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "Error");

  py::enum_<Fuel>(m, "Fuel")
      .value("coal", Fuel::Coal)
      .value("gas", Fuel::Gas)
      .value("nuclear", Fuel::Nuclear)
      .value("hydro", Fuel::Hydro)
      .value("solar", Fuel::Solar)
      .value("wind", Fuel::Wind)
      .value("other", Fuel::Other);

  py::class_<Bus>(m, "Bus")
      .def(py::init<>())
      .def_readwrite("id", &Bus::id)
      .def_readwrite("voltage_kv", &Bus::voltage_kv)
      .def_readwrite("county", &Bus::county)
      .def_readwrite("region", &Bus::region);

  py::class_<Line>(m, "Line")
      .def(py::init<>())
      .def_readwrite("id", &Line::id)
      .def_readwrite("from_bus", &Line::from_bus)
      .def_readwrite("to_bus", &Line::to_bus)
      .def_readwrite("reactance_pu", &Line::reactance_pu)
      .def_readwrite("capacity_mw", &Line::capacity_mw)
      .def_readwrite("length_mi", &Line::length_mi)
      .def_readwrite("voltage_kv", &Line::voltage_kv);

  py::class_<GenerationUnit>(m, "GenerationUnit")
      .def(py::init<>())
      .def_readwrite("id", &GenerationUnit::id)
      .def_readwrite("bus", &GenerationUnit::bus)
      .def_readwrite("fuel", &GenerationUnit::fuel)
      .def_readwrite("capacity_mw", &GenerationUnit::capacity_mw)
      .def_readwrite("cost_per_mwh", &GenerationUnit::cost_per_mwh)
      .def_readwrite("emission_t_per_gwh", &GenerationUnit::emission_t_per_gwh)
      .def_readwrite("ramp_up_mw_per_h", &GenerationUnit::ramp_up_mw_per_h)
      .def_readwrite("ramp_down_mw_per_h", &GenerationUnit::ramp_down_mw_per_h)
      .def_readwrite("capability_profile", &GenerationUnit::capability_profile);

  py::class_<LoadPoint>(m, "LoadPoint")
      .def(py::init<>())
      .def_readwrite("id", &LoadPoint::id)
      .def_readwrite("bus", &LoadPoint::bus)
      .def_readwrite("peak_mw", &LoadPoint::peak_mw)
      .def_readwrite("region", &LoadPoint::region);

  py::class_<County>(m, "County")
      .def(py::init<>())
      .def_readwrite("fips", &County::fips)
      .def_readwrite("state", &County::state)
      .def_readwrite("population", &County::population)
      .def_readwrite("annual_gallons", &County::annual_gallons);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<>())
      .def_readwrite("steps", &TimeGrid::steps)
      .def_readwrite("dt_h", &TimeGrid::dt_h);

  py::class_<GridCase>(m, "GridCase")
      .def(py::init<>())
      .def_readwrite("name", &GridCase::name)
      .def_readwrite("buses", &GridCase::buses)
      .def_readwrite("lines", &GridCase::lines)
      .def_readwrite("generators", &GridCase::generators)
      .def_readwrite("loads", &GridCase::loads)
      .def_readwrite("counties", &GridCase::counties)
      .def_readwrite("time_grid", &GridCase::time_grid)
      .def_readwrite("loss_rate", &GridCase::loss_rate)
      .def_readwrite("slack_buses", &GridCase::slack_buses)
      .def("bus_index", &GridCase::bus_index);

  py::class_<Violation>(m, "Violation")
      .def_readonly("entity", &Violation::entity)
      .def_readonly("message", &Violation::message);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("violations", &ValidationReport::violations)
      .def_readonly("warnings", &ValidationReport::warnings)
      .def("ok", &ValidationReport::ok)
      .def("__str__", &ValidationReport::to_string);

  m.def("validate_case", &validate_case);
  m.def("islands", &islands);
  m.def("charging_sites", &charging_sites, py::arg("grid"), py::arg("county"),
        py::arg("voltage_threshold_kv") = 200.0);

  py::class_<PtdfMatrix>(m, "PtdfMatrix")
      .def_readonly("values", &PtdfMatrix::values)
      .def_readonly("bus_index", &PtdfMatrix::bus_index)
      .def_readonly("line_index", &PtdfMatrix::line_index)
      .def_readonly("island", &PtdfMatrix::island)
      .def_readonly("slack_bus", &PtdfMatrix::slack_bus);

  py::class_<PtdfSet>(m, "PtdfSet")
      .def_readonly("per_island", &PtdfSet::per_island)
      .def("value", &PtdfSet::value, py::arg("line"), py::arg("bus"));

  py::class_<EntityColumns>(m, "EntityColumns")
      .def_readonly("generator_bus", &EntityColumns::generator_bus)
      .def_readonly("load_bus", &EntityColumns::load_bus)
      .def_readonly("station_county_bus", &EntityColumns::station_county_bus);

  m.def("compute_case_ptdf", &compute_case_ptdf);
  m.def("entity_columns", &entity_columns, py::arg("ptdf"), py::arg("grid"),
        py::arg("voltage_threshold_kv") = 200.0);
  m.def("ptdf_column", &ptdf_column);
  m.def("dc_flows_direct", &dc_flows_direct);

  py::enum_<Relation>(m, "Relation")
      .value("less_eq", Relation::LessEq)
      .value("equal", Relation::Equal)
      .value("greater_eq", Relation::GreaterEq);

  py::enum_<LpStatus>(m, "LpStatus")
      .value("optimal", LpStatus::Optimal)
      .value("infeasible", LpStatus::Infeasible)
      .value("unbounded", LpStatus::Unbounded);

  py::class_<LinearProgram>(m, "LinearProgram")
      .def(py::init<>())
      .def("add_variable", &LinearProgram::add_variable, py::arg("name"), py::arg("lower"),
           py::arg("upper"), py::arg("cost") = 0.0)
      .def("add_row", &LinearProgram::add_row, py::arg("name"), py::arg("relation"),
           py::arg("rhs"), py::arg("coeffs"))
      .def("num_variables", &LinearProgram::num_variables)
      .def("num_rows", &LinearProgram::num_rows);

  py::class_<LpSolution>(m, "LpSolution")
      .def_readonly("status", &LpSolution::status)
      .def_readonly("values", &LpSolution::values)
      .def_readonly("objective_value", &LpSolution::objective_value)
      .def_readonly("duals", &LpSolution::duals)
      .def_readonly("max_primal_residual", &LpSolution::max_primal_residual)
      .def_readonly("infeasibility", &LpSolution::infeasibility)
      .def_readonly("iterations", &LpSolution::iterations);

  py::class_<ResidualReport>(m, "ResidualReport")
      .def_readonly("max_bound_violation", &ResidualReport::max_bound_violation)
      .def_readonly("max_row_violation", &ResidualReport::max_row_violation)
      .def_readonly("complementarity_gap", &ResidualReport::complementarity_gap);

  m.def("solve_lp", [](const LinearProgram& lp) { return solve_lp(lp); });
  m.def("check_solution", &check_solution, py::arg("lp"), py::arg("solution"),
        py::arg("tol") = 1e-6);
  m.def("dump_lp", &dump_lp);

  py::class_<Station>(m, "Station")
      .def_readonly("county", &Station::county)
      .def_readonly("bus", &Station::bus)
      .def_readonly("id", &Station::id);

  py::class_<BaseDispatch>(m, "BaseDispatch")
      .def_readonly("p_star", &BaseDispatch::p_star)
      .def_readonly("flows", &BaseDispatch::flows)
      .def_readonly("cost_total", &BaseDispatch::cost_total)
      .def_readonly("emissions_total_t", &BaseDispatch::emissions_total_t)
      .def_readonly("max_residual", &BaseDispatch::max_residual);

  py::class_<EvDispatch>(m, "EvDispatch")
      .def_readonly("stations", &EvDispatch::stations)
      .def_readonly("delta_p", &EvDispatch::delta_p)
      .def_readonly("charging", &EvDispatch::charging)
      .def_readonly("flows", &EvDispatch::flows)
      .def_readonly("e_ev_t", &EvDispatch::e_ev_t)
      .def_readonly("emissions_total_t", &EvDispatch::emissions_total_t);

  py::class_<UpgradePlan>(m, "UpgradePlan")
      .def_readonly("delta_f_mw", &UpgradePlan::delta_f_mw)
      .def_readonly("objective_mw_mile", &UpgradePlan::objective_mw_mile)
      .def_readonly("achieved_e_ev_t", &UpgradePlan::achieved_e_ev_t)
      .def_readonly("binding_lines", &UpgradePlan::binding_lines)
      .def_readonly("deviation_flags", &UpgradePlan::deviation_flags);

  m.def("solve_model_one",
        [](const GridCase& grid, const HourlyLoads& loads, const PtdfSet& ptdf) {
          return solve_model_one(grid, loads, ptdf);
        });
  m.def("solve_model_two",
        [](const GridCase& grid, const HourlyLoads& loads, const BaseDispatch& base,
           const EvDemand& demand, const PtdfSet& ptdf, double threshold) {
          return solve_model_two(grid, loads, base, demand, ptdf, threshold);
        },
        py::arg("grid"), py::arg("loads"), py::arg("base"), py::arg("demand"), py::arg("ptdf"),
        py::arg("voltage_threshold_kv") = 200.0);
  m.def("solve_model_three",
        [](const GridCase& grid, const std::vector<HourlyLoads>& days,
           const std::vector<BaseDispatch>& bases, const EvDemand& demand, double e_ev_max,
           const PtdfSet& ptdf, double threshold) {
          return solve_model_three(grid, days, bases, demand, e_ev_max, ptdf, threshold);
        },
        py::arg("grid"), py::arg("days"), py::arg("bases"), py::arg("demand"),
        py::arg("e_ev_max_t"), py::arg("ptdf"), py::arg("voltage_threshold_kv") = 200.0);
  m.def("ev_emissions", &ev_emissions);
  m.def("relax_network", &relax_network);
  m.def("upgrade_envelope", &upgrade_envelope);
  m.def("apply_upgrade", &apply_upgrade);

  py::class_<FleetAssumptions>(m, "FleetAssumptions")
      .def(py::init<>())
      .def_readwrite("icv_mpge", &FleetAssumptions::icv_mpge)
      .def_readwrite("ev_mpge", &FleetAssumptions::ev_mpge)
      .def_readwrite("kwh_per_gallon_ev", &FleetAssumptions::kwh_per_gallon_ev)
      .def_readwrite("kg_co2_per_gallon", &FleetAssumptions::kg_co2_per_gallon)
      .def_readwrite("penetration", &FleetAssumptions::penetration)
      .def("validate", &FleetAssumptions::validate);

  py::class_<CountyDemand>(m, "CountyDemand")
      .def_readonly("fips", &CountyDemand::fips)
      .def_readonly("e_c_daily_mwh", &CountyDemand::e_c_daily_mwh)
      .def_readonly("icv_gallons_daily", &CountyDemand::icv_gallons_daily);

  m.def("allocate_state_fuel",
        [](double gallons, const std::vector<County>& counties) {
          return allocate_state_fuel(gallons, counties);
        });
  m.def("county_ev_demand", &county_ev_demand);
  m.def("county_ev_demands", &county_ev_demands);
  m.def("icv_emissions_annual_t",
        [](double gallons, double kg) { return icv_emissions_annual_t(gallons, kg); },
        py::arg("gallons_annual"), py::arg("kg_co2_per_gallon") = 8.9);
  m.def("vehicle_operational_emissions_t", &vehicle_operational_emissions_t);
  m.def("project_growth", &project_growth);

  py::class_<CapacityMix>(m, "CapacityMix")
      .def_readonly("variable_renewable_mw", &CapacityMix::variable_renewable_mw)
      .def_readonly("hydro_mw", &CapacityMix::hydro_mw)
      .def_readonly("nonrenewable_mw", &CapacityMix::nonrenewable_mw)
      .def("total", &CapacityMix::total)
      .def("level", &CapacityMix::level);

  m.def("capacity_mix", [](const GridCase& grid) { return capacity_mix(grid); });
  m.def("renewable_scale_factor",
        [](const GridCase& grid, double target) { return renewable_scale_factor(grid, target); });
  m.def("apply_renewable_scaling", &apply_renewable_scaling);
  m.def("scale_to_renewable_level", &scale_to_renewable_level);
  m.def("representative_days", &representative_days);
  m.def("scale_bus_loads", &scale_bus_loads);
  m.def("annualize_monthly", &annualize_monthly);
  m.def("congestion_induced", &congestion_induced, py::arg("grid"), py::arg("loads"),
        py::arg("demand"), py::arg("voltage_threshold_kv") = 200.0);

  py::class_<DaySet>(m, "DaySet")
      .def(py::init<>())
      .def_readwrite("months", &DaySet::months);

  py::class_<AnnualResult>(m, "AnnualResult")
      .def_readonly("e_ev_t", &AnnualResult::e_ev_t)
      .def_readonly("e_icv_t", &AnnualResult::e_icv_t)
      .def_readonly("e_v_t", &AnnualResult::e_v_t)
      .def_readonly("congestion_induced_t", &AnnualResult::congestion_induced_t);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("penetration", &SweepRow::penetration)
      .def_readonly("renewable_level", &SweepRow::renewable_level)
      .def_readonly("mode", &SweepRow::mode)
      .def_readonly("result", &SweepRow::result)
      .def_readonly("status", &SweepRow::status);

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def(py::init<>())
      .def_readwrite("penetrations", &ScenarioSpec::penetrations)
      .def_readwrite("renewable_levels", &ScenarioSpec::renewable_levels)
      .def_readwrite("include_constrained", &ScenarioSpec::include_constrained)
      .def_readwrite("include_relaxed", &ScenarioSpec::include_relaxed)
      .def_readwrite("days", &ScenarioSpec::days)
      .def_readwrite("growth_years", &ScenarioSpec::growth_years)
      .def_readwrite("load_growth_rate", &ScenarioSpec::load_growth_rate)
      .def_readwrite("fuel_growth_rate", &ScenarioSpec::fuel_growth_rate);

  py::class_<SweepOutput>(m, "SweepOutput")
      .def_readonly("rows", &SweepOutput::rows)
      .def_readonly("metadata", &SweepOutput::metadata);

  m.def("run_sweep", &run_sweep);

  py::class_<WindCurve>(m, "WindCurve")
      .def(py::init<>())
      .def_readwrite("cut_in_mps", &WindCurve::cut_in_mps)
      .def_readwrite("cut_off_mps", &WindCurve::cut_off_mps)
      .def_readwrite("rated_mps", &WindCurve::rated_mps);

  m.def("wind_to_per_unit",
        [](double v, const WindCurve& curve) { return wind_to_per_unit(v, curve); },
        py::arg("speed_mps"), py::arg("curve") = WindCurve());

  py::class_<RunConfig>(m, "RunConfig")
      .def_readwrite("slack_buses", &RunConfig::slack_buses)
      .def_readwrite("tau", &RunConfig::tau)
      .def_readwrite("fleet", &RunConfig::fleet)
      .def_readwrite("voltage_threshold_kv", &RunConfig::voltage_threshold_kv)
      .def_readwrite("out_dir", &RunConfig::out_dir);

  py::class_<LoadedBundle>(m, "LoadedBundle")
      .def_readonly("grid", &LoadedBundle::grid)
      .def_readonly("curves", &LoadedBundle::curves)
      .def_readonly("config", &LoadedBundle::config);

  m.def("load_case",
        [](const std::string& dir) { return load_case(std::filesystem::path(dir)); });
  m.def("synth_case",
        [](const std::string& templ, int buses, std::uint64_t seed) {
          return synth_case(synth_template_from_string(templ), buses, seed);
        },
        py::arg("template"), py::arg("buses") = 3, py::arg("seed") = 1);
  m.def("write_case_bundle",
        [](const LoadedBundle& bundle, const std::string& dir) {
          write_case_bundle(bundle, std::filesystem::path(dir));
        });
}
