/**
 * Admin console screens: login, dashboard, catalog forms with a per-weekday
 * working-hours editor, and the patients/doctors/appointments tables.
 * A patient-role token is shown a blocking page, mirroring the server's 403.
 */

import type { App } from "./app.js";
import type { DoctorDetail } from "./api.js";
import { clear, el, labelled } from "./dom.js";
import { WEEKDAYS, parseHoursSpec, stateLabel } from "./format.js";
import type { Route } from "./router.js";

export async function renderAdminScreen(app: App, route: Route): Promise<void> {
  if (route.name === "adminLogin") {
    return renderAdminLogin(app);
  }
  if (app.role === null) {
    app.navigate({ name: "adminLogin" });
    return;
  }
  if (app.role !== "admin") {
    app.renderBlocked("The admin console requires an admin account. Patient sessions are not accepted here.");
    return;
  }
  switch (route.name) {
    case "adminDashboard":
      return renderDashboard(app);
    case "adminAddHospital":
      return renderAddHospital(app);
    case "adminAddDoctor":
      return renderAddDoctor(app);
    case "adminPatients":
      return renderPatients(app);
    case "adminDoctors":
      return renderDoctors(app);
    case "adminAppointments":
      return renderAppointments(app);
    default:
      app.renderChrome(el("p", { className: "muted" }, "Screen not found."));
  }
}

async function renderAdminLogin(app: App): Promise<void> {
  const error = app.errorBox();
  const username = el("input", { name: "username", placeholder: "admin username" });
  const password = el("input", { name: "password", type: "password", placeholder: "password" });
  const form = el(
    "form",
    {
      className: "card",
      onSubmit: (e) => {
        e.preventDefault();
        app.run(async () => {
          clear(error);
          try {
            const result = await app.api.adminLogin(username.value, password.value);
            app.api.setToken(result.token);
            app.session.save({ token: result.token, role: result.role, expiresAt: result.expires_at });
            app.role = result.role;
            app.navigate({ name: "adminDashboard" });
          } catch (err) {
            app.showError(error, err);
          }
        });
      },
    },
    el("h2", {}, "Admin sign in"),
    labelled("Username", username),
    labelled("Password", password),
    el("button", { type: "submit" }, "Sign in"),
    error,
  );
  app.renderChrome(form, el("p", {}, app.link("Patient app", { name: "login" })));
}

async function renderDashboard(app: App): Promise<void> {
  app.renderChrome(
    el("h2", {}, "Admin dashboard"),
    el("ul", { className: "menu admin-menu" },
      el("li", {}, app.link("Add hospital", { name: "adminAddHospital" })),
      el("li", {}, app.link("Add doctor", { name: "adminAddDoctor" })),
      el("li", {}, app.link("Patients", { name: "adminPatients" })),
      el("li", {}, app.link("Doctors", { name: "adminDoctors" })),
      el("li", {}, app.link("Appointments", { name: "adminAppointments" })),
    ),
  );
}

async function renderAddHospital(app: App): Promise<void> {
  const error = app.errorBox();
  const success = el("div", { className: "success" });
  const name = el("input", { name: "name", placeholder: "name" });
  const address = el("input", { name: "address", placeholder: "address" });
  const phone = el("input", { name: "phone", placeholder: "+92 51 ..." });
  const latitude = el("input", { name: "latitude", placeholder: "33.6" });
  const longitude = el("input", { name: "longitude", placeholder: "73.0" });
  const description = el("input", { name: "description", placeholder: "short description" });
  const timezone = el("input", { name: "timezone", value: "UTC" });

  const form = el(
    "form",
    {
      className: "card",
      onSubmit: (e) => {
        e.preventDefault();
        app.run(async () => {
          clear(error);
          clear(success);
          try {
            const hospital = await app.api.adminAddHospital({
              name: name.value,
              address: address.value,
              phone: phone.value,
              latitude: Number(latitude.value),
              longitude: Number(longitude.value),
              description: description.value,
              timezone: timezone.value,
            });
            success.append(el("p", {}, `Hospital ${hospital.name} added.`));
          } catch (err) {
            app.showError(error, err);
          }
        });
      },
    },
    el("h2", {}, "Add hospital"),
    labelled("Name", name),
    labelled("Address", address),
    labelled("Phone", phone),
    labelled("Latitude", latitude),
    labelled("Longitude", longitude),
    labelled("Description", description),
    labelled("Time zone", timezone),
    el("button", { type: "submit" }, "Add hospital"),
    error,
    success,
  );
  app.renderChrome(form);
}

async function renderAddDoctor(app: App): Promise<void> {
  const error = app.errorBox();
  const success = el("div", { className: "success" });
  const main = app.renderChrome(el("h2", {}, "Add doctor"), error);

  let hospitals;
  try {
    hospitals = await app.api.hospitals();
  } catch (err) {
    app.showError(error, err);
    return;
  }
  const hospitalSelect = document.createElement("select");
  hospitalSelect.name = "hospital";
  for (const hospital of hospitals) {
    const option = document.createElement("option");
    option.value = hospital.id;
    option.textContent = hospital.name;
    hospitalSelect.append(option);
  }

  const name = el("input", { name: "name", placeholder: "Dr. ..." });
  const specialty = el("input", { name: "specialty", placeholder: "specialty" });
  const phone = el("input", { name: "phone", placeholder: "+92 300 ..." });
  const email = el("input", { name: "email", placeholder: "doctor@clinic.example" });

  // one free-text line per weekday: "09:00-13:00, 14:00-17:00"
  const hourInputs = new Map<string, HTMLInputElement>();
  const hoursEditor = el("fieldset", { className: "hours-editor" }, el("legend", {}, "Working hours"));
  for (const { key, label } of WEEKDAYS) {
    const input = el("input", { name: `hours-${key}`, placeholder: "09:00-13:00, 14:00-17:00" });
    hourInputs.set(key, input);
    hoursEditor.append(labelled(label, input));
  }

  const form = el(
    "form",
    {
      className: "card",
      onSubmit: (e) => {
        e.preventDefault();
        app.run(async () => {
          clear(error);
          clear(success);
          const workingHours: Record<string, [string, string][]> = {};
          for (const [key, input] of hourInputs) {
            let intervals;
            try {
              intervals = parseHoursSpec(input.value);
            } catch (parseErr) {
              app.showError(error, parseErr);
              return;
            }
            if (intervals.length > 0) workingHours[key] = intervals;
          }
          try {
            const doctor = await app.api.adminAddDoctor({
              hospital_id: hospitalSelect.value,
              name: name.value,
              specialty: specialty.value,
              phone: phone.value,
              email: email.value,
              working_hours: workingHours,
            });
            success.append(el("p", {}, `Doctor ${doctor.name} added to ${doctor.hospital_name}.`));
          } catch (err) {
            app.showError(error, err);
          }
        });
      },
    },
    labelled("Hospital", hospitalSelect),
    labelled("Name", name),
    labelled("Specialty", specialty),
    labelled("Phone", phone),
    labelled("Email", email),
    hoursEditor,
    el("button", { type: "submit" }, "Add doctor"),
    success,
  );
  main.append(form);
}

async function renderPatients(app: App): Promise<void> {
  const error = app.errorBox();
  const table = el("table", { className: "table patients" });
  app.renderChrome(el("h2", {}, "Patients"), error, table);
  try {
    const rows = await app.api.adminPatients();
    table.append(headerRow("Username", "Email", "Registered"));
    for (const row of rows) {
      table.append(
        el("tr", {}, el("td", {}, row.username), el("td", {}, row.email), el("td", {}, row.created_at)),
      );
    }
    if (rows.length === 0) table.append(el("tr", {}, el("td", { className: "muted" }, "No patients registered.")));
  } catch (err) {
    app.showError(error, err);
  }
}

async function renderDoctors(app: App): Promise<void> {
  const error = app.errorBox();
  const table = el("table", { className: "table doctors" });
  app.renderChrome(el("h2", {}, "Doctors"), error, table);
  try {
    const rows = await app.api.adminDoctors();
    table.append(headerRow("Name", "Specialty", "Hospital", "Email", "Active"));
    for (const row of rows) {
      table.append(
        el("tr", {},
          el("td", {}, row.name),
          el("td", {}, row.specialty),
          el("td", {}, row.hospital_name),
          el("td", {}, row.email),
          el("td", {}, row.active ? "yes" : "no"),
        ),
      );
    }
    if (rows.length === 0) table.append(el("tr", {}, el("td", { className: "muted" }, "No doctors registered.")));
  } catch (err) {
    app.showError(error, err);
  }
}

async function renderAppointments(app: App): Promise<void> {
  const error = app.errorBox();
  const table = el("table", { className: "table appointments" });

  let doctors: DoctorDetail[] = [];
  try {
    doctors = await app.api.adminDoctors();
  } catch {
    // the filter dropdown is optional; the table call below reports errors
  }
  const doctorSelect = document.createElement("select");
  doctorSelect.name = "doctor";
  const anyOption = document.createElement("option");
  anyOption.value = "";
  anyOption.textContent = "any doctor";
  doctorSelect.append(anyOption);
  for (const doctor of doctors) {
    const option = document.createElement("option");
    option.value = doctor.id;
    option.textContent = doctor.name;
    doctorSelect.append(option);
  }
  const fromInput = el("input", { type: "date", name: "from" });
  const toInput = el("input", { type: "date", name: "to" });

  const load = () => {
    app.run(async () => {
      clear(error);
      clear(table);
      try {
        const rows = await app.api.adminAppointments({
          doctor_id: doctorSelect.value || undefined,
          from: fromInput.value || undefined,
          to: toInput.value || undefined,
        });
        table.append(headerRow("Date", "Start", "Doctor", "Patient", "State", ""));
        for (const row of rows) {
          const actions = el("td", {});
          if (row.state === "reserved") {
            actions.append(
              el("button", {
                className: "cancel",
                onClick: () => {
                  app.run(async () => {
                    clear(error);
                    try {
                      await app.api.cancel(row.id);
                      load();
                    } catch (err) {
                      app.showError(error, err);
                    }
                  });
                },
              }, "Cancel"),
            );
          }
          table.append(
            el("tr", { className: `state-${row.state}` },
              el("td", {}, row.date),
              el("td", {}, row.start),
              el("td", {}, row.doctor_name),
              el("td", {}, row.patient_username ?? ""),
              el("td", {}, stateLabel(row.state)),
              actions,
            ),
          );
        }
        if (rows.length === 0) table.append(el("tr", {}, el("td", { className: "muted" }, "No appointments.")));
      } catch (err) {
        app.showError(error, err);
      }
    });
  };

  const filters = el("div", { className: "filters" },
    labelled("Doctor", doctorSelect),
    labelled("From", fromInput),
    labelled("To", toInput),
    el("button", { className: "apply", onClick: () => load() }, "Apply"),
  );
  app.renderChrome(el("h2", {}, "Appointments"), filters, error, table);
  load();
}

function headerRow(...titles: string[]): HTMLTableRowElement {
  return el("tr", {}, ...titles.map((t) => el("th", {}, t)));
}
