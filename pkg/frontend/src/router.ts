/** Hash-based routes mirroring the app's screen graph. */

export type Route =
  | { name: "splash" }
  | { name: "signup" }
  | { name: "login" }
  | { name: "menu" }
  | { name: "hospitals" }
  | { name: "hospitalDetail"; hospitalId: string }
  | { name: "hospitalDoctors"; hospitalId: string }
  | { name: "doctorDetail"; doctorId: string }
  | { name: "availability"; doctorId: string; date?: string }
  | { name: "myAppointments" }
  | { name: "notifications" }
  | { name: "schedules" }
  | { name: "scheduleDetail"; group: string }
  | { name: "about" }
  | { name: "adminLogin" }
  | { name: "adminDashboard" }
  | { name: "adminAddHospital" }
  | { name: "adminAddDoctor" }
  | { name: "adminPatients" }
  | { name: "adminDoctors" }
  | { name: "adminAppointments" }
  | { name: "notFound"; hash: string };

export function parseHash(hash: string): Route {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  const [pathPart = "", queryPart = ""] = raw.split("?", 2) as [string?, string?];
  const query = new URLSearchParams(queryPart);
  const segments = pathPart.split("/").filter((s) => s.length > 0);

  if (segments.length === 0) return { name: "splash" };
  const [head, second, third] = segments;

  switch (head) {
    case "signup":
      return { name: "signup" };
    case "login":
      return { name: "login" };
    case "menu":
      return { name: "menu" };
    case "hospitals":
      if (second === undefined) return { name: "hospitals" };
      if (third === "doctors") return { name: "hospitalDoctors", hospitalId: second };
      if (third === undefined) return { name: "hospitalDetail", hospitalId: second };
      break;
    case "doctors":
      if (second !== undefined && third === "availability") {
        return { name: "availability", doctorId: second, date: query.get("date") ?? undefined };
      }
      if (second !== undefined && third === undefined) return { name: "doctorDetail", doctorId: second };
      break;
    case "appointments":
      if (second === undefined) return { name: "myAppointments" };
      break;
    case "notifications":
      if (second === undefined) return { name: "notifications" };
      break;
    case "schedules":
      if (second === undefined) return { name: "schedules" };
      if (third === undefined) return { name: "scheduleDetail", group: decodeURIComponent(second) };
      break;
    case "about":
      return { name: "about" };
    case "admin":
      if (second === undefined) return { name: "adminLogin" };
      if (second === "dashboard") return { name: "adminDashboard" };
      if (second === "hospitals" && third === "new") return { name: "adminAddHospital" };
      if (second === "doctors" && third === "new") return { name: "adminAddDoctor" };
      if (second === "patients") return { name: "adminPatients" };
      if (second === "doctors") return { name: "adminDoctors" };
      if (second === "appointments") return { name: "adminAppointments" };
      break;
  }
  return { name: "notFound", hash };
}

export function routeHash(route: Route): string {
  switch (route.name) {
    case "splash":
      return "#/";
    case "signup":
      return "#/signup";
    case "login":
      return "#/login";
    case "menu":
      return "#/menu";
    case "hospitals":
      return "#/hospitals";
    case "hospitalDetail":
      return `#/hospitals/${route.hospitalId}`;
    case "hospitalDoctors":
      return `#/hospitals/${route.hospitalId}/doctors`;
    case "doctorDetail":
      return `#/doctors/${route.doctorId}`;
    case "availability":
      return route.date
        ? `#/doctors/${route.doctorId}/availability?date=${route.date}`
        : `#/doctors/${route.doctorId}/availability`;
    case "myAppointments":
      return "#/appointments";
    case "notifications":
      return "#/notifications";
    case "schedules":
      return "#/schedules";
    case "scheduleDetail":
      return `#/schedules/${encodeURIComponent(route.group)}`;
    case "about":
      return "#/about";
    case "adminLogin":
      return "#/admin";
    case "adminDashboard":
      return "#/admin/dashboard";
    case "adminAddHospital":
      return "#/admin/hospitals/new";
    case "adminAddDoctor":
      return "#/admin/doctors/new";
    case "adminPatients":
      return "#/admin/patients";
    case "adminDoctors":
      return "#/admin/doctors";
    case "adminAppointments":
      return "#/admin/appointments";
    case "notFound":
      return route.hash;
  }
}
